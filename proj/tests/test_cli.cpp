#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "wildfire_cli_test";

int run(const std::string& args, const std::string& env = {}) {
  const auto cmd = env + (env.empty() ? "" : " ") + "\"" WILDFIRE_CLI "\" " + args + " >\"" +
                   (kDir / "stdout.txt").string() + "\" 2>\"" + (kDir / "stderr.txt").string() + "\"";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

struct Workspace {
  Workspace() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }
  ~Workspace() { fs::remove_all(kDir); }
};

}  // namespace

TEST_CASE("exit codes") {
  Workspace ws;
  CHECK(run("--help") == 0);
  CHECK(run("report --help") == 0);
  CHECK(run("") != 0);
  CHECK(run("frobnicate") == 2);
  CHECK(run("synth --users notanumber") == 2);
  CHECK(run("synth --users 1 --out " + q(kDir / "x.csv")) == 2);
  CHECK(run("report --in " + q(kDir / "absent.csv") + " --out " + q(kDir / "r")) == 1);
  CHECK(run("report --in " + q(kDir / "absent.csv") + " --from 2020-05-01 --to 2020-04-01") == 2);
  CHECK(run("slices --in " + q(kDir / "absent.csv") + " --dt 0") == 2);
  CHECK(run("ingest --in " + q(kDir / "absent.csv") + " --out " + q(kDir / "a.wfev")) == 1);
}

TEST_CASE("synth, ingest and slices") {
  Workspace ws;
  const auto csv = kDir / "s.csv";
  REQUIRE(run("synth --users 500 --duration 10d --base-rate 10 --no-ramp --seed 5 --out " + q(csv)) == 0);
  CHECK(fs::exists(csv));
  const auto ledger = nlohmann::json::parse(slurp(kDir / "s.csv.ledger.json"));
  const auto n = ledger["n_events"].get<std::size_t>();
  CHECK(n > 400);

  const auto wfev = kDir / "s.wfev";
  REQUIRE(run("ingest --in " + q(csv) + " --from 2020-02-01 --to 2020-02-11 --out " + q(wfev)) == 0);
  const auto stats = nlohmann::json::parse(slurp(kDir / "stdout.txt"));
  CHECK(stats["events"].get<std::size_t>() == n);

  REQUIRE(run("slices --in " + q(wfev) + " --from 2020-02-01 --to 2020-02-11 --mode temporal --dt 24h") == 0);
  const auto table = slurp(kDir / "stdout.txt");
  CHECK(table.rfind("index,t_start,t_end,n_events,n_active_vertices,n_simple_edges,partial\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 11);

  REQUIRE(run("slices export --in " + q(wfev) + " --from 2020-02-01 --to 2020-02-11 --dt 24h --slice 3 --out " +
              q(kDir / "slice3.csv")) == 0);
  CHECK(slurp(kDir / "slice3.csv").rfind("source,target,timestamp,kind,status_id\n", 0) == 0);
  CHECK(run("slices export --in " + q(wfev) + " --from 2020-02-01 --to 2020-02-11 --dt 24h --slice 11") == 2);
}

TEST_CASE("config files and environment") {
  Workspace ws;
  const auto csv = kDir / "s.csv";
  {
    std::ofstream toml(kDir / "synth.toml");
    toml << "users = 300\nduration = \"5d\"\nbase-rate = 5\nno-ramp = true\nseed = 9\nout = " << q(csv) << "\n";
  }
  REQUIRE(run("synth --config " + q(kDir / "synth.toml")) == 0);
  const auto a = slurp(csv);
  {
    std::ofstream js(kDir / "synth.json");
    js << nlohmann::json{{"users", 300}, {"duration", "5d"}, {"base-rate", 5}, {"no-ramp", true}, {"seed", 9},
                         {"out", csv.string()}}
              .dump();
  }
  REQUIRE(run("synth --config " + q(kDir / "synth.json")) == 0);
  CHECK(slurp(csv) == a);
  CHECK(!a.empty());

  CHECK(run("synth --config " + q(kDir / "missing.toml")) != 0);

  // WILDFIRE_OUT supplies the output directory
  const auto env_out = kDir / "from_env";
  REQUIRE(run("metrics --in " + q(csv) + " --from 2020-02-01 --to 2020-02-06 --dt 24h",
              "WILDFIRE_OUT=" + q(env_out)) == 0);
  CHECK(fs::exists(env_out / "series.csv"));
  CHECK(fs::exists(env_out / "topk.csv"));
  CHECK(fs::exists(env_out / "degree_hist.csv"));
}

TEST_CASE("powerlaw and transition from plain files") {
  Workspace ws;
  {
    std::ofstream s(kDir / "samples.txt");
    for (int i = 1; i <= 200; ++i) s << (1 + 1000 / (i * i)) << "\n";
  }
  REQUIRE(run("powerlaw --samples " + q(kDir / "samples.txt") + " --resamples 0") == 0);
  const auto fit = nlohmann::json::parse(slurp(kDir / "stdout.txt"));
  CHECK(fit.contains("alpha"));

  {
    std::ofstream s(kDir / "few.txt");
    s << "1\n2\n3\n";
  }
  REQUIRE(run("powerlaw --samples " + q(kDir / "few.txt") + " --resamples 0") != 0);

  {
    std::ofstream s(kDir / "series.csv");
    s << "slice,contacts\n";
    for (int i = 1; i <= 200; ++i) s << i << "," << (i < 120 ? 10 : 100) << "\n";
  }
  REQUIRE(run("transition --series-file " + q(kDir / "series.csv") + " --column contacts --out " +
              q(kDir / "tr")) == 0);
  const auto tr = nlohmann::json::parse(slurp(kDir / "tr" / "transition.json"));
  CHECK(tr["transition"] == true);
  CHECK(tr["onset_slice"] == 121);
}

TEST_CASE("report end to end") {
  Workspace ws;
  const auto csv = kDir / "s.csv";
  REQUIRE(run("synth --users 1200 --duration 20d --base-rate 10 --seed 2 --out " + q(csv)) == 0);
  REQUIRE(run("report --in " + q(csv) +
              " --from 2020-02-01 --to 2020-02-21 --baseline-window 10 --local-window 10 --resamples 0 --out " +
              q(kDir / "rep")) == 0);
  const auto m = nlohmann::json::parse(slurp(kDir / "rep" / "manifest.json"));
  CHECK(m["complete"] == true);
  for (const auto& t : m["tables"]) CHECK(t["status"] != "missing");
}
