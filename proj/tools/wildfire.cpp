#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wildfire/event_file.hpp"
#include "wildfire/parallel.hpp"
#include "wildfire/report.hpp"
#include "wildfire/synth.hpp"
#include "wildfire/time_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wildfire;

namespace {

// --config accepts TOML (CLI11's native reader) or a JSON object whose
// nested objects play the role of TOML tables. Top-level keys belong to
// `section`, the subcommand being run.
class TomlOrJsonConfig : public CLI::ConfigBase {
 public:
  explicit TomlOrJsonConfig(std::string section = {}) : section_(std::move(section)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<CLI::ConfigItem> items;
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream again(text);
      items = CLI::ConfigBase::from_config(again);
    } else {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        throw CLI::ConversionError("config", e.what());
      }
      flatten(j, {}, items);
    }
    if (!section_.empty())
      for (auto& item : items)
        if (item.parents.empty() || item.parents.front() != section_) item.parents.insert(item.parents.begin(), section_);
    return items;
  }

 private:
  std::string section_;

  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  static void flatten(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        flatten(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

void add_config(CLI::App* app) {
  app->config_formatter(std::make_shared<TomlOrJsonConfig>());
  app->set_config("--config", "", "TOML or JSON file with option values")->check(CLI::ExistingFile);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << bytes;
  if (!out) throw IoError("write failed: " + p.string());
}

void emit(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-")
    std::cout << bytes;
  else
    put(path, bytes);
}

struct InputOptions {
  std::vector<std::string> inputs;
  std::string format;
  std::string from = "2020-02-01";
  std::string to = "2020-05-11";
  bool no_cache = false;
  bool no_dedup = false;
  unsigned threads = 0;

  void attach(CLI::App* app, bool required = true) {
    auto* in = app->add_option("--in", inputs, "Input files (csv, jsonl, osf, or canonical .wfev)");
    if (required) in->required();
    app->add_option("--format", format, "Input format: csv, jsonl or osf (default: by extension)");
    app->add_option("--from", from, "Window start t0 (ISO-8601)")->capture_default_str();
    app->add_option("--to", to, "Window end / horizon, exclusive (ISO-8601)")->capture_default_str();
    app->add_flag("--no-cache", no_cache, "Always parse raw input; do not read or write the .wfev cache");
    app->add_flag("--no-dedup", no_dedup, "Keep exact duplicate records");
    app->add_option("--threads", threads, "Worker threads (0: available parallelism)")->capture_default_str();
  }

  void fill(RunConfig& cfg) const {
    cfg.inputs.assign(inputs.begin(), inputs.end());
    if (!format.empty()) cfg.format = parse_input_format(format);
    cfg.t0 = parse_datetime_or_throw(from);
    cfg.horizon = parse_datetime_or_throw(to);
    cfg.use_cache = !no_cache;
    cfg.deduplicate = !no_dedup;
    cfg.threads = threads;
  }
};

struct SliceOptions {
  std::string mode = "temporal";
  std::string dt = "4h";

  void attach(CLI::App* app) {
    app->add_option("--mode", mode, "Slice mode: temporal or accumulative")->capture_default_str();
    app->add_option("--dt", dt, "Slice width, e.g. 4h, 24h")->capture_default_str();
  }
  SliceSetting setting() const { return {parse_slice_mode(mode), parse_duration(dt)}; }
};

struct CommunityOptions {
  std::string objective = "modularity";
  double resolution = 1.0;
  bool weighted = false;
  bool no_warm_start = false;

  void attach(CLI::App* app) {
    app->add_option("--objective", objective, "modularity or cpm")->capture_default_str();
    app->add_option("--resolution", resolution, "Leiden resolution")->capture_default_str();
    app->add_flag("--weighted", weighted, "Weight edges by contact count");
    app->add_flag("--no-warm-start", no_warm_start,
                  "Run every accumulative slice from singletons instead of the previous partition");
  }
  void fill(RunConfig& cfg) const {
    cfg.objective = parse_objective(objective);
    cfg.resolution = resolution;
    cfg.weighted = weighted;
    cfg.warm_start = !no_warm_start;
  }
};

struct TransitionOptions {
  TransitionConfig cfg;
  std::string series = "contacts";

  void attach(CLI::App* app) {
    app->add_option("--baseline-window", cfg.baseline_window, "Baseline slices w_b")->capture_default_str();
    app->add_option("--ramp-factor", cfg.ramp_factor, "Onset ratio over the baseline median r")->capture_default_str();
    app->add_option("--sustain", cfg.sustain, "Sustain window w_s")->capture_default_str();
    app->add_option("--decay", cfg.decay, "Growth rate below which the transition ends")->capture_default_str();
    app->add_option("--spike-z", cfg.spike_z, "Precursor threshold in robust standard deviations")
        ->capture_default_str();
    app->add_option("--local-window", cfg.local_window, "Precursor rolling window")->capture_default_str();
    app->add_option("--series", series, "contacts, users or top_share")->capture_default_str();
  }
};

std::vector<double> parse_percents(const std::vector<double>& raw) {
  std::vector<double> out;
  for (auto p : raw) {
    // accept 2 or 0.02 for two percent
    out.push_back(p > 1.0 ? p / 100.0 : p);
  }
  return out;
}

std::string json_line(const json& j) { return j.dump(2) + "\n"; }

std::string out_dir_default() {
  const char* env = std::getenv("WILDFIRE_OUT");
  return env && *env ? env : "wildfire_out";
}

//---------------------------------------------------------------- commands

void cmd_ingest(const InputOptions& in, const std::string& out, const std::string& export_path) {
  RunConfig cfg;
  in.fill(cfg);
  cfg.use_cache = false;
  LoadStats stats;
  const auto g = load_graph(cfg, &stats);
  if (!out.empty()) write_event_file(out, g);
  if (!export_path.empty()) {
    std::ostringstream ss;
    if (guess_input_format(export_path) == InputFormat::jsonl)
      write_events_jsonl(ss, g.events, g.vertex_names, g.status_names);
    else
      write_events_csv(ss, g.events, g.vertex_names, g.status_names);
    put(export_path, ss.str());
  }
  std::cout << json_line(to_json(stats, g));
}

void cmd_slices(const InputOptions& in, const SliceOptions& so, const std::string& out) {
  const auto s = so.setting();
  RunConfig cfg;
  in.fill(cfg);
  const auto g = load_graph(cfg);
  std::ostringstream ss;
  write_slices_csv(ss, slice_summaries(g, SliceSpec{s.mode, s.delta_t, g.t0, g.horizon}));
  emit(out, ss.str());
}

void cmd_slices_export(const InputOptions& in, const SliceOptions& so, std::size_t index, const std::string& out,
                       const std::string& as) {
  const auto s = so.setting();
  RunConfig cfg;
  in.fill(cfg);
  const auto g = load_graph(cfg);
  const auto slices = make_slices(g, SliceSpec{s.mode, s.delta_t, g.t0, g.horizon});
  if (index == 0 || index > slices.size())
    throw ArgumentError("slice index " + std::to_string(index) + " outside 1.." + std::to_string(slices.size()));
  const auto& slice = slices[index - 1];
  std::ostringstream ss;
  if (as == "jsonl")
    write_events_jsonl(ss, slice.events, g.vertex_names, g.status_names);
  else if (as == "csv")
    write_events_csv(ss, slice.events, g.vertex_names, g.status_names);
  else
    throw ArgumentError("export format must be csv or jsonl");
  emit(out, ss.str());
}

void cmd_metrics(const InputOptions& in, const SliceOptions& so, const std::vector<double>& percents,
                 std::size_t annd_slice, const fs::path& out) {
  RunConfig cfg;
  in.fill(cfg);
  cfg.percents = parse_percents(percents);
  cfg.validate();
  const auto g = load_graph(cfg);
  const auto setting = so.setting();
  const auto a = analyse_slices(g, setting, cfg, 0, {.communities = false, .top_share = true});
  fs::create_directories(out);
  const auto label = setting.label();
  std::ostringstream series, topk, hist, logbin;
  write_series_csv(series, a);
  write_topk_csv(topk, a);
  const auto full = slice_view(g.events);
  write_degree_hist_csv(hist, full);
  write_degree_logbin_csv(logbin, full);
  put(out / "series.csv", series.str());
  put(out / "topk.csv", topk.str());
  put(out / "degree_hist.csv", hist.str());
  put(out / "degree_logbin.csv", logbin.str());
  if (annd_slice) {
    if (annd_slice > a.slices.size()) throw ArgumentError("--annd-slice outside the slice range");
    const auto view = slice_view(a.slices[annd_slice - 1]);
    std::ostringstream annd;
    write_annd_csv(annd, annd_curve(view.graph));
    put(out / ("annd_" + label + "_slice" + std::to_string(annd_slice) + ".csv"), annd.str());
  }
}

void cmd_communities(const InputOptions& in, const SliceOptions& so, const CommunityOptions& co, std::uint64_t seed,
                     const std::string& decile, const fs::path& out) {
  RunConfig cfg;
  in.fill(cfg);
  co.fill(cfg);
  cfg.seed = seed;
  cfg.decile = decile == "by_percentile" ? DecileRule::by_percentile : DecileRule::by_count;
  if (decile != "by_count" && decile != "by_percentile") throw ArgumentError("--decile must be by_count or by_percentile");
  cfg.validate();
  const auto g = load_graph(cfg);
  const auto setting = so.setting();
  const auto a = analyse_slices(g, setting, cfg, 0, {.communities = true, .top_share = false});
  fs::create_directories(out);
  const auto label = setting.label();
  std::ostringstream clusters, hist, members;
  write_clusters_csv(clusters, a, cfg.decile);
  write_cluster_hist_csv(hist, cluster_size_distribution(a.partitions));
  put(out / ("fig6_clusters_" + label + ".csv"), clusters.str());
  put(out / ("fig3_cluster_hist_" + label + ".csv"), hist.str());
  if (!a.partitions.empty()) {
    write_membership_csv(members, a.partitions.back(), g);
    put(out / ("communities_" + label + "_final.csv"), members.str());
  }
}

// One integer per line, or "value,count" pairs; '#' lines and a non-numeric header are skipped.
SampleHistogram read_samples(const fs::path& p) {
  std::istringstream in(slurp(p));
  SampleHistogram h;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long value = 0, count = 1;
    if (!(fields >> value)) {
      if (first) {
        first = false;
        continue;
      }
      throw ArgumentError("bad sample line: " + line);
    }
    first = false;
    if (!(fields >> count)) count = 1;
    if (value <= 0 || count < 0) throw ArgumentError("samples must be positive integers: " + line);
    h[static_cast<std::uint64_t>(value)] += static_cast<std::uint64_t>(count);
  }
  return h;
}

void cmd_powerlaw(const std::string& samples, const InputOptions& in, const std::string& degree_mode,
                  std::size_t resamples, std::uint64_t seed, const std::string& out) {
  SampleHistogram hist;
  if (!samples.empty()) {
    hist = read_samples(samples);
  } else {
    if (in.inputs.empty()) throw ArgumentError("powerlaw needs --samples or --in");
    RunConfig cfg;
    in.fill(cfg);
    const auto g = load_graph(cfg);
    const auto mode = degree_mode == "unique_neighbors" ? DegreeMode::unique_neighbors : DegreeMode::contacts;
    if (degree_mode != "contacts" && degree_mode != "unique_neighbors")
      throw ArgumentError("--degree-mode must be contacts or unique_neighbors");
    for (const auto& [k, c] : degree_distribution(slice_view(g.events), mode))
      if (k > 0) hist[k] = c;
  }
  if (resamples != 0 && resamples < 100) throw ArgumentError("--resamples must be 0 or at least 100");
  const auto fit = fit_power_law(hist);
  json j = {{"alpha", fit.alpha},     {"xmin", fit.xmin}, {"ks", fit.ks_statistic}, {"n_tail", fit.n_tail},
            {"n", fit.n},             {"loglik", fit.loglik}, {"n_resamples", resamples}, {"seed", seed},
            {"p_value", nullptr}};
  if (resamples > 0) j["p_value"] = goodness_of_fit(fit, hist, resamples, seed, in.threads ? in.threads : default_threads()).p_value;
  emit(out, json_line(j));
}

// Reads one numeric column (by header name, or the last column) of a CSV series.
std::vector<double> read_series(const fs::path& p, const std::string& column) {
  std::istringstream in(slurp(p));
  std::string line;
  std::vector<double> values;
  std::optional<std::size_t> col;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    f.push_back(cur);
    return f;
  };
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line);
    if (!header_seen) {
      header_seen = true;
      const auto it = std::find(f.begin(), f.end(), column);
      if (it != f.end()) {
        col = static_cast<std::size_t>(it - f.begin());
        continue;
      }
      char* end = nullptr;
      std::strtod(f.back().c_str(), &end);
      if (end == f.back().c_str()) throw ArgumentError("column '" + column + "' not found in " + p.string());
    }
    const auto idx = col ? *col : f.size() - 1;
    if (idx >= f.size()) throw ArgumentError("short row in " + p.string());
    try {
      values.push_back(std::stod(f[idx]));
    } catch (const std::exception&) {
      throw ArgumentError("non-numeric value '" + f[idx] + "' in " + p.string());
    }
  }
  return values;
}

void cmd_transition(const std::string& series_file, const std::string& column, const InputOptions& in,
                    const SliceOptions& so, const TransitionOptions& to, const fs::path& out) {
  fs::create_directories(out);
  auto tcfg = to.cfg;
  if (!series_file.empty()) {
    auto report = detect_transition(read_series(series_file, column), tcfg);
    report.series = column;
    put(out / "transition.json", json_line(to_json(report)));
    return;
  }
  if (in.inputs.empty()) throw ArgumentError("transition needs --series-file or --in");
  RunConfig cfg;
  in.fill(cfg);
  const auto g = load_graph(cfg);
  const auto setting = so.setting();
  const auto kind = parse_series_kind(to.series);
  cfg.percents = {0.02};
  const auto a =
      analyse_slices(g, setting, cfg, 0, {.communities = false, .top_share = kind == SeriesKind::top_share});
  tcfg.difference = setting.mode == SliceMode::accumulative && kind != SeriesKind::top_share;
  const auto report = detect_transition(transition_series(a, kind), tcfg);
  auto j = to_json(report);
  const auto windows = phase_windows(report, a.spec);
  for (std::size_t k = 0; k < 3; ++k)
    j["windows"][std::string(to_string(static_cast<Phase>(k)))] = {format_datetime(windows[k].start),
                                                                     format_datetime(windows[k].end)};
  const auto phases = annd_by_phase(g, report, a.spec);
  j["phase_warnings"] = phases.warnings;
  for (const auto& w : phases.warnings) std::cerr << "warning: " << w << '\n';
  put(out / "transition.json", json_line(j));
  for (std::size_t k = 0; k < 3; ++k) {
    std::ostringstream ss;
    write_annd_csv(ss, phases.curves[k]);
    put(out / ("annd_phase_" + std::string(to_string(static_cast<Phase>(k))) + ".csv"), ss.str());
  }
}

struct SynthOptions {
  std::string spec;
  std::optional<std::size_t> users;
  std::optional<std::string> start, duration, rate_unit;
  std::optional<double> pa, base_rate;
  std::optional<std::uint64_t> seed;
  bool no_ramp = false;
  std::string out = "synthetic.csv";
  std::string ledger;

  void attach(CLI::App* app) {
    app->add_option("--spec", spec, "JSON generator config (missing keys take defaults)");
    app->add_option("--users", users, "Number of users");
    app->add_option("--start", start, "Stream start (ISO-8601)");
    app->add_option("--duration", duration, "Stream length, e.g. 100d");
    app->add_option("--rate-unit", rate_unit, "Window for base_rate, e.g. 4h");
    app->add_option("--pa", pa, "Preferential attachment strength");
    app->add_option("--base-rate", base_rate, "Expected events per rate unit before the ramp");
    app->add_option("--seed", seed, "Random seed");
    app->add_flag("--no-ramp", no_ramp, "Flat rate");
    app->add_option("--out", out, "Event file (.csv, .jsonl or .wfev)")->capture_default_str();
    app->add_option("--ledger", ledger, "Ledger JSON path (default: <out>.ledger.json)");
  }
};

void cmd_synth(const SynthOptions& o) {
  json j = o.spec.empty() ? json::object() : json::parse(slurp(o.spec));
  if (o.users) j["n_users"] = *o.users;
  if (o.start) j["start"] = *o.start;
  if (o.duration) j["duration"] = *o.duration;
  if (o.rate_unit) j["rate_unit"] = *o.rate_unit;
  if (o.pa) j["pa_strength"] = *o.pa;
  if (o.base_rate) j["base_rate"] = *o.base_rate;
  if (o.seed) j["seed"] = *o.seed;
  if (o.no_ramp) j["ramp"] = nullptr;
  const auto cfg = synth_config_from_json(j);
  const auto result = generate(cfg);
  const fs::path out = o.out;
  std::ostringstream ss;
  const auto ext = out.extension().string();
  if (ext == ".wfev") {
    auto g = build_underlying_graph(result.log, cfg.start, cfg.start + cfg.duration);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_event_file(out, g);
  } else {
    if (ext == ".jsonl" || ext == ".ndjson")
      write_events_jsonl(ss, result.log.events, result.log.users.names(), result.log.statuses.names());
    else
      write_events_csv(ss, result.log.events, result.log.users.names(), result.log.statuses.names());
    put(out, ss.str());
  }
  auto ledger_path = o.ledger.empty() ? fs::path(o.out + ".ledger.json") : fs::path(o.ledger);
  json lj = to_json(result.ledger);
  lj["config"] = to_json(cfg);
  put(ledger_path, json_line(lj));
  std::cout << json_line({{"events", result.ledger.n_events}, {"users", cfg.n_users}, {"out", out.string()},
                          {"ledger", ledger_path.string()}});
}

struct ReportOptions {
  std::vector<std::string> slice_specs = {"temporal:4h", "accumulative:24h"};
  std::vector<double> percents = {2, 5, 10, 20};
  std::uint64_t seed = 42;
  std::size_t resamples = 100;
  std::string decile = "by_count";

  void attach(CLI::App* app) {
    app->add_option("--slice-spec", slice_specs, "Slice settings as mode:dt")->capture_default_str();
    app->add_option("--percents", percents, "Top-k percentages")->capture_default_str();
    app->add_option("--seed", seed, "Root seed for every random choice")->capture_default_str();
    app->add_option("--resamples", resamples, "Bootstrap resamples for fits (0 disables)")->capture_default_str();
    app->add_option("--decile", decile, "Top-decile rule: by_count or by_percentile")->capture_default_str();
  }
};

std::vector<SliceSetting> parse_slice_specs(const std::vector<std::string>& specs) {
  std::vector<SliceSetting> out;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ArgumentError("slice spec '" + s + "' must look like mode:dt");
    out.push_back({parse_slice_mode(s.substr(0, colon)), parse_duration(s.substr(colon + 1))});
  }
  return out;
}

int cmd_report(const InputOptions& in, const CommunityOptions& co, const TransitionOptions& to,
               const ReportOptions& ro, const fs::path& out) {
  RunConfig cfg;
  in.fill(cfg);
  co.fill(cfg);
  cfg.slices = parse_slice_specs(ro.slice_specs);
  cfg.percents = parse_percents(ro.percents);
  cfg.seed = ro.seed;
  cfg.n_resamples = ro.resamples;
  if (ro.decile != "by_count" && ro.decile != "by_percentile")
    throw ArgumentError("--decile must be by_count or by_percentile");
  cfg.decile = ro.decile == "by_count" ? DecileRule::by_count : DecileRule::by_percentile;
  cfg.transition = to.cfg;
  cfg.transition_series = parse_series_kind(to.series);
  cfg.out_dir = out;
  const auto result = run_report(cfg);
  for (const auto& w : result.manifest["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  if (!result.complete) {
    std::cerr << "error: some tables could not be written; see manifest.json\n";
    return 1;
  }
  std::cout << (out / "manifest.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal interaction-network analytics for digital wildfires"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  int status = 0;

  // ingest
  InputOptions ingest_in;
  std::string ingest_out, ingest_export;
  auto* ingest = app.add_subcommand("ingest", "Parse raw contacts into a canonical event file");
  add_config(ingest);
  ingest_in.attach(ingest);
  ingest->add_option("--out", ingest_out, "Canonical event file to write (.wfev)");
  ingest->add_option("--export", ingest_export, "Also write the cleaned events as csv/jsonl");
  ingest->callback([&] { cmd_ingest(ingest_in, ingest_out, ingest_export); });

  // slices [export]
  InputOptions slices_in;
  SliceOptions slices_so;
  std::string slices_out;
  auto* slices = app.add_subcommand("slices", "List the slices of a slice setting");
  add_config(slices);
  slices_in.attach(slices);
  slices_so.attach(slices);
  slices->add_option("--out", slices_out, "Output CSV (default stdout)");
  std::size_t export_index = 0;
  std::string export_out, export_as = "csv";
  auto* slices_export =
      slices->add_subcommand("export", "Write per-slice summaries, or the events of one slice with --slice");
  slices_export->fallthrough();
  slices_export->add_option("--slice", export_index, "1-based slice index");
  slices_export->add_option("--as", export_as, "csv or jsonl")->capture_default_str();
  slices_export->add_option("--out", export_out, "Output file (default stdout)");
  slices->callback([&] {
    if (slices_export->parsed() && export_index > 0)
      cmd_slices_export(slices_in, slices_so, export_index, export_out, export_as);
    else if (slices_export->parsed())
      cmd_slices(slices_in, slices_so, export_out);
    else
      cmd_slices(slices_in, slices_so, slices_out);
  });

  // metrics
  InputOptions metrics_in;
  SliceOptions metrics_so;
  std::vector<double> metrics_percents = {2, 5, 10, 20};
  std::size_t annd_slice = 0;
  std::string metrics_out = out_dir_default();
  auto* metrics = app.add_subcommand("metrics", "Contact/user series, top-k shares and degree distributions");
  add_config(metrics);
  metrics_in.attach(metrics);
  metrics_so.attach(metrics);
  metrics->add_option("--percents", metrics_percents, "Top-k percentages")->capture_default_str();
  metrics->add_option("--annd-slice", annd_slice, "Also write the ANND curve of this slice");
  metrics->add_option("--out", metrics_out, "Output directory")->envname("WILDFIRE_OUT")->capture_default_str();
  metrics->callback([&] { cmd_metrics(metrics_in, metrics_so, metrics_percents, annd_slice, metrics_out); });

  // communities
  InputOptions comm_in;
  SliceOptions comm_so;
  CommunityOptions comm_co;
  std::uint64_t comm_seed = 42;
  std::string comm_decile = "by_count";
  std::string comm_out = out_dir_default();
  auto* communities = app.add_subcommand("communities", "Leiden communities per slice");
  add_config(communities);
  comm_in.attach(communities);
  comm_so.attach(communities);
  comm_co.attach(communities);
  communities->add_option("--seed", comm_seed, "Root seed")->capture_default_str();
  communities->add_option("--decile", comm_decile, "by_count or by_percentile")->capture_default_str();
  communities->add_option("--out", comm_out, "Output directory")->envname("WILDFIRE_OUT")->capture_default_str();
  communities->callback([&] { cmd_communities(comm_in, comm_so, comm_co, comm_seed, comm_decile, comm_out); });

  // powerlaw
  InputOptions pl_in;
  std::string pl_samples, pl_degree = "contacts", pl_out;
  std::size_t pl_resamples = 100;
  std::uint64_t pl_seed = 42;
  auto* powerlaw = app.add_subcommand("powerlaw", "Discrete power-law fit with bootstrap p-value");
  add_config(powerlaw);
  pl_in.attach(powerlaw, false);
  powerlaw->add_option("--samples", pl_samples, "Integer samples, one per line or value,count");
  powerlaw->add_option("--degree-mode", pl_degree, "With --in: contacts or unique_neighbors")->capture_default_str();
  powerlaw->add_option("--resamples", pl_resamples, "Bootstrap resamples (0 disables)")->capture_default_str();
  powerlaw->add_option("--seed", pl_seed, "Bootstrap seed")->capture_default_str();
  powerlaw->add_option("--out", pl_out, "fit.json path (default stdout)");
  powerlaw->callback([&] { cmd_powerlaw(pl_samples, pl_in, pl_degree, pl_resamples, pl_seed, pl_out); });

  // transition
  InputOptions tr_in;
  SliceOptions tr_so;
  TransitionOptions tr_to;
  std::string tr_series_file, tr_column = "contacts";
  std::string tr_out = out_dir_default();
  auto* transition = app.add_subcommand("transition", "Phase transition, precursors and per-phase ANND");
  add_config(transition);
  tr_in.attach(transition, false);
  tr_so.attach(transition);
  tr_to.attach(transition);
  transition->add_option("--series-file", tr_series_file, "CSV series instead of an event input");
  transition->add_option("--column", tr_column, "Column of --series-file")->capture_default_str();
  transition->add_option("--out", tr_out, "Output directory")->envname("WILDFIRE_OUT")->capture_default_str();
  transition->callback([&] { cmd_transition(tr_series_file, tr_column, tr_in, tr_so, tr_to, tr_out); });

  // synth
  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic contact stream and its ledger");
  add_config(synth);
  syn.attach(synth);
  synth->callback([&] { cmd_synth(syn); });

  // report
  InputOptions rep_in;
  CommunityOptions rep_co;
  TransitionOptions rep_to;
  ReportOptions rep_ro;
  std::string rep_out = out_dir_default();
  auto* report = app.add_subcommand("report", "Run the full pipeline and write every table");
  add_config(report);
  rep_in.attach(report);
  rep_co.attach(report);
  rep_to.attach(report);
  rep_ro.attach(report);
  report->add_option("--out", rep_out, "Output directory")->envname("WILDFIRE_OUT")->capture_default_str();
  report->callback([&] { status = cmd_report(rep_in, rep_co, rep_to, rep_ro, rep_out); });

  // CLI11 only reads config files at the top level, so a subcommand's
  // --config is lifted there and its keys routed into the subcommand.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    CLI::App* sub = nullptr;
    try {
      sub = app.get_subcommand(args[i]);
    } catch (const CLI::OptionNotFound&) {
      continue;
    }
    for (std::size_t k = i + 1; k < args.size(); ++k) {
      std::string file;
      if (args[k] == "--config" && k + 1 < args.size())
        file = args[k + 1];
      else if (args[k].rfind("--config=", 0) == 0)
        file = args[k].substr(9);
      else
        continue;
      app.config_formatter(std::make_shared<TomlOrJsonConfig>(sub->get_name()));
      app.set_config("--subcommand-config")->group("")->check(CLI::ExistingFile);
      args.insert(args.begin(), {"--subcommand-config", file});
      break;
    }
    break;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
