#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wildfire/event_file.hpp"
#include "wildfire/report.hpp"
#include "wildfire/synth.hpp"

using namespace wildfire;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv_oracle(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Fixture {
  fs::path dir = fs::temp_directory_path() / "wildfire_report_test";
  fs::path input = dir / "contacts.csv";
  SynthConfig synth;

  Fixture() {
    fs::remove_all(dir);
    fs::create_directories(dir);
    synth.n_users = 1500;
    synth.duration = 30 * 86400;
    synth.base_rate = 12;
    synth.ramp = RampConfig{synth.start + 20 * 86400, 1.0, 8.0, 86400};
    for (int k = 0; k < 3; ++k) synth.communities.push_back({300, synth.start + (19 + k) * 86400});
    const auto out = generate(synth);
    std::ofstream f(input);
    write_events_csv(f, out.log.events, out.log.users.names(), out.log.statuses.names());
  }
  ~Fixture() { fs::remove_all(dir); }

  RunConfig config(const std::string& out) const {
    RunConfig c;
    c.inputs = {input};
    c.t0 = synth.start;
    c.horizon = synth.start + synth.duration;
    c.transition.baseline_window = 12;
    c.transition.local_window = 12;
    c.out_dir = dir / out;
    c.threads = 1;
    return c;
  }
};

}  // namespace

TEST_CASE("config hash tracks semantics only") {
  RunConfig a;
  const auto h = a.hash();
  CHECK(h.size() == 16);
  RunConfig b = a;
  b.threads = 7;
  b.out_dir = "elsewhere";
  b.use_cache = false;
  CHECK(b.hash() == h);
  b = a;
  b.seed = 43;
  CHECK(b.hash() != h);
  b = a;
  b.resolution = 0.5;
  CHECK(b.hash() != h);
  b = a;
  b.slices[0].delta_t = 3600;
  CHECK(b.hash() != h);
  b = a;
  b.transition.ramp_factor = 4;
  CHECK(b.hash() != h);
  CHECK(hex64(fnv1a64("wildfire")) == hex64(fnv_oracle("wildfire")));
}

TEST_CASE("config validation") {
  RunConfig c;
  c.inputs = {"x.csv"};
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.horizon = bad.t0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = c;
  bad.percents = {0.0};
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = c;
  bad.n_resamples = 50;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = c;
  bad.inputs.clear();
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = c;
  bad.slices.clear();
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("report is complete, verifiable and deterministic") {
  Fixture fx;
  auto c1 = fx.config("run1");
  const auto r1 = run_report(c1);
  CHECK(r1.complete);
  const auto& m = r1.manifest;
  CHECK(m["complete"] == true);
  CHECK(m["config_hash"] == c1.hash());
  CHECK(m["graph"]["events"].get<std::size_t>() > 5000);

  std::set<std::string> names;
  for (const auto& t : m["tables"]) {
    const auto name = t["name"].get<std::string>();
    names.insert(name);
    REQUIRE(t["status"] != "missing");
    const auto bytes = slurp(c1.out_dir / name);
    CHECK(t["bytes"].get<std::size_t>() == bytes.size());
    CHECK(t["fnv1a64"] == hex64(fnv_oracle(bytes)));
  }
  for (const char* want :
       {"fig4_series_temporal_4h.csv", "fig7_topk_temporal_4h.csv", "fig6_clusters_accumulative_24h.csv",
        "fig3_degree_hist.csv", "fig5_annd_pre.csv", "fig5_annd_during.csv", "fig5_annd_post.csv",
        "transition.json", "fits.json", "communities_accumulative_24h_final.csv"})
    CHECK(names.count(want) == 1);
  CHECK(fs::exists(c1.out_dir / "manifest.json"));

  const auto series = slurp(c1.out_dir / "fig4_series_temporal_4h.csv");
  CHECK(series.rfind("slice,start,end,contacts,users\n", 0) == 0);
  CHECK(std::count(series.begin(), series.end(), '\n') == 181);

  const auto tj = nlohmann::json::parse(slurp(c1.out_dir / "transition.json"));
  CHECK(tj["primary"] == "temporal_4h");
  CHECK(tj["settings"]["temporal_4h"]["transition"] == true);

  const auto fits = nlohmann::json::parse(slurp(c1.out_dir / "fits.json"));
  CHECK(fits["degree_contacts"].contains("alpha"));
  CHECK(fits["degree_contacts"].contains("p_value"));

  // the cache written by the first run gives the same bytes, as do more threads
  auto c2 = fx.config("run2");
  c2.threads = 3;
  LoadStats stats;
  load_graph(c2, &stats);
  CHECK(stats.from_cache);
  const auto r2 = run_report(c2);
  CHECK(r2.manifest == r1.manifest);
  for (const auto& t : m["tables"]) {
    const auto name = t["name"].get<std::string>();
    CHECK(slurp(c1.out_dir / name) == slurp(c2.out_dir / name));
  }

  auto c3 = fx.config("run3");
  c3.seed = 7;
  CHECK(run_report(c3).manifest["config_hash"] != m["config_hash"]);
}

TEST_CASE("load_graph clips the window and removes duplicates") {
  Fixture fx;
  auto c = fx.config("unused");
  c.use_cache = false;
  const auto base = load_graph(c);
  {
    std::ofstream f(fx.input, std::ios::app);
    f << "u1,u2," << c.t0 - 10 << ",retweet,\n";
    f << "u1,u2," << c.horizon << ",retweet,\n";
  }
  // duplicate the first data row
  const auto text = slurp(fx.input);
  const auto first = text.find('\n') + 1;
  const auto row = text.substr(first, text.find('\n', first) - first + 1);
  std::ofstream(fx.input, std::ios::app) << row;
  LoadStats s;
  const auto g = load_graph(c, &s);
  CHECK(g.event_count() == base.event_count());
  CHECK(s.out_of_window == 2);
  CHECK(s.duplicates_removed == 1);
  CHECK_FALSE(s.from_cache);

  c.inputs = {fx.dir / "missing.csv"};
  CHECK_THROWS_AS(load_graph(c), IoError);
}

TEST_CASE("fit_json reports unfittable samples") {
  const auto j = fit_json({{1, 3}, {2, 1}}, 0, 1, 1);
  CHECK(j["error"] == "insufficient_data");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
}
