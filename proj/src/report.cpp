#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wildfire/event_file.hpp"
#include "wildfire/parallel.hpp"
#include "wildfire/report.hpp"
#include "wildfire/time_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wildfire {

std::string SliceSetting::label() const { return std::string(to_string(mode)) + "_" + format_duration(delta_t); }

std::string_view to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::contacts: return "contacts";
    case SeriesKind::users: return "users";
    case SeriesKind::top_share: return "top_share";
  }
  return "?";
}

SeriesKind parse_series_kind(std::string_view name) {
  if (name == "contacts") return SeriesKind::contacts;
  if (name == "users") return SeriesKind::users;
  if (name == "top_share" || name == "topk") return SeriesKind::top_share;
  throw ArgumentError("unknown series '" + std::string(name) + "' (expected contacts, users or top_share)");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

void RunConfig::validate() const {
  if (inputs.empty()) throw ArgumentError("no input given");
  if (horizon <= t0) throw ArgumentError("horizon must be after t0");
  if (slices.empty()) throw ArgumentError("at least one slice setting is required");
  for (const auto& s : slices)
    if (s.delta_t <= 0) throw ArgumentError("slice width must be positive");
  if (!(resolution > 0.0)) throw ArgumentError("resolution must be positive");
  if (percents.empty()) throw ArgumentError("at least one top-k percentage is required");
  for (auto p : percents)
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("top-k fractions must lie in (0, 1]");
  if (n_resamples != 0 && n_resamples < 100) throw ArgumentError("bootstrap needs 0 (off) or at least 100 resamples");
}

json RunConfig::semantic_json() const {
  json in = json::array();
  for (const auto& p : inputs) in.push_back(p.generic_string());
  json sl = json::array();
  for (const auto& s : slices) sl.push_back({{"mode", to_string(s.mode)}, {"delta_t", s.delta_t}});
  return {{"inputs", in},
          {"format", format ? json(to_string(*format)) : json(nullptr)},
          {"t0", format_datetime(t0)},
          {"horizon", format_datetime(horizon)},
          {"slices", sl},
          {"objective", to_string(objective)},
          {"resolution", resolution},
          {"weighted", weighted},
          {"warm_start", warm_start},
          {"seed", seed},
          {"transition", to_json(transition)},
          {"transition_series", to_string(transition_series)},
          {"percents", percents},
          {"decile", decile == DecileRule::by_count ? "by_count" : "by_percentile"},
          {"n_resamples", n_resamples},
          {"deduplicate", deduplicate}};
}

std::string RunConfig::hash() const { return hex64(fnv1a64(semantic_json().dump())); }

unsigned RunConfig::worker_count() const { return threads ? threads : default_threads(); }

namespace {

ContactLog to_log(const TemporalGraph& g) {
  ContactLog log;
  for (const auto& n : g.vertex_names) log.users.intern(n);
  for (const auto& n : g.status_names) log.statuses.intern(n);
  log.events = g.events;
  return log;
}

// Appends src to dst, re-interning src's ids into dst's tables.
void merge_log(ContactLog& dst, const ContactLog& src) {
  std::vector<std::uint64_t> user_map(src.users.size()), status_map(src.statuses.size());
  for (std::size_t i = 0; i < user_map.size(); ++i) user_map[i] = dst.users.intern(src.users.name(i));
  for (std::size_t i = 0; i < status_map.size(); ++i) status_map[i] = dst.statuses.intern(src.statuses.name(i));
  dst.events.reserve(dst.events.size() + src.events.size());
  for (auto e : src.events) {
    e.source = user_map[e.source];
    e.target = user_map[e.target];
    if (e.status != kNoStatus) e.status = status_map[e.status];
    dst.events.push_back(e);
  }
}

void add_stats(ParseStats& into, const ParseStats& s) {
  into.records_parsed += s.records_parsed;
  into.malformed += s.malformed;
  into.self_loops += s.self_loops;
  into.blank_lines += s.blank_lines;
  into.header = into.header || s.header;
}

fs::path cache_path(const fs::path& input, bool dedup) {
  auto p = input;
  p += dedup ? ".wfev" : ".raw.wfev";
  return p;
}

EventFileHeader source_header(const fs::path& input) {
  std::error_code ec;
  EventFileHeader h;
  h.source_size = fs::file_size(input, ec);
  if (ec) throw IoError("cannot stat " + input.string() + ": " + ec.message());
  h.source_mtime = static_cast<std::int64_t>(fs::last_write_time(input, ec).time_since_epoch().count());
  return h;
}

void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace

TemporalGraph load_graph(const RunConfig& cfg, LoadStats* stats) {
  if (cfg.inputs.empty()) throw ArgumentError("no input given");
  LoadStats local;
  auto& st = stats ? *stats : local;
  st = LoadStats{};

  const bool single_raw = cfg.inputs.size() == 1 && !is_event_file(cfg.inputs.front());
  if (single_raw && cfg.use_cache) {
    const auto cache = cache_path(cfg.inputs.front(), cfg.deduplicate);
    const auto want = source_header(cfg.inputs.front());
    std::error_code ec;
    if (fs::exists(cache, ec) && is_event_file(cache)) {
      try {
        EventFileHeader have;
        auto g = read_event_file(cache, &have);
        if (have.source_size == want.source_size && have.source_mtime == want.source_mtime && g.t0 == cfg.t0 &&
            g.horizon == cfg.horizon) {
          st.from_cache = true;
          return g;
        }
      } catch (const IoError&) {
        // stale or damaged cache; rebuild below
      }
    }
  }

  ContactLog log;
  for (const auto& input : cfg.inputs) {
    if (!fs::exists(input)) throw IoError("input not found: " + input.string());
    if (is_event_file(input)) {
      merge_log(log, to_log(read_event_file(input)));
      continue;
    }
    const auto fmt = cfg.format ? *cfg.format : guess_input_format(input);
    auto parsed = load_contacts(input, fmt);
    add_stats(st.parse, parsed.stats);
    if (cfg.inputs.size() == 1) {
      log = std::move(parsed.log);
    } else {
      merge_log(log, parsed.log);
    }
  }
  std::vector<ContactEvent> events = std::move(log.events);
  if (cfg.deduplicate) {
    const auto before = events.size();
    events = deduplicate(events);
    st.duplicates_removed = before - events.size();
  }
  const auto before_window = events.size();
  events = filter_window(events, cfg.t0, cfg.horizon);
  st.out_of_window = before_window - events.size();
  auto g = build_underlying_graph(log, events, cfg.t0, cfg.horizon);

  if (single_raw && cfg.use_cache) {
    // best effort: an unwritable input directory only costs the speed-up
    const auto cache = cache_path(cfg.inputs.front(), cfg.deduplicate);
    auto tmp = cache;
    tmp += ".tmp";
    try {
      write_event_file(tmp, g, source_header(cfg.inputs.front()));
      std::error_code ec;
      fs::rename(tmp, cache, ec);
      if (ec) fs::remove(tmp, ec);
    } catch (const IoError&) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }
  return g;
}

json to_json(const LoadStats& s, const TemporalGraph& g) {
  return {{"records_parsed", s.parse.records_parsed},
          {"malformed", s.parse.malformed},
          {"self_loops", s.parse.self_loops},
          {"blank_lines", s.parse.blank_lines},
          {"header", s.parse.header},
          {"duplicates_removed", s.duplicates_removed},
          {"out_of_window", s.out_of_window},
          {"from_cache", s.from_cache},
          {"events", g.event_count()},
          {"users", g.vertex_count()},
          {"t0", format_datetime(g.t0)},
          {"horizon", format_datetime(g.horizon)}};
}

namespace {

// Leiden start for a grown accumulative view: old vertices keep their
// community, newcomers start alone.
std::vector<std::uint32_t> carry_membership(const CommunityPartition& prev, const SliceView& view) {
  std::vector<std::uint32_t> init(view.active.size());
  std::uint32_t fresh = 0;
  for (auto c : prev.membership) fresh = std::max(fresh, c + 1);
  std::size_t j = 0;
  for (std::size_t i = 0; i < view.active.size(); ++i) {
    const auto v = view.active[i];
    while (j < prev.vertices.size() && prev.vertices[j] < v) ++j;
    init[i] = j < prev.vertices.size() && prev.vertices[j] == v ? prev.membership[j] : fresh++;
  }
  return init;
}

}  // namespace

SliceAnalysis analyse_slices(const TemporalGraph& g, const SliceSetting& setting, const RunConfig& cfg,
                             std::size_t setting_index, AnalysisOptions opts) {
  SliceAnalysis a;
  a.setting = setting;
  a.spec = SliceSpec{setting.mode, setting.delta_t, g.t0, g.horizon};
  a.slices = make_slices(g, a.spec);
  std::tie(a.contacts, a.users) = contact_user_series(a.slices);
  a.contacts.spec = a.users.spec = a.spec;

  const auto n = a.slices.size();
  a.top_share.resize(n);
  if (opts.communities) a.partitions.resize(n);
  const auto root = derive_seed(cfg.seed, setting_index);
  auto options_for = [&](std::size_t index) {
    LeidenOptions o;
    o.objective = cfg.objective;
    o.resolution = cfg.resolution;
    o.weighted = cfg.weighted;
    o.seed = derive_seed(root, index);
    return o;
  };
  auto process = [&](std::size_t i, const SliceView& view, std::vector<std::uint32_t> initial) {
    if (opts.top_share && view.n_events > 0) a.top_share[i] = top_active_fraction(view, cfg.percents);
    if (opts.communities) {
      auto o = options_for(a.slices[i].index);
      o.initial = std::move(initial);
      a.partitions[i] = partition_view(view, a.slices[i].index, setting.mode, o);
    }
  };
  const auto workers = cfg.worker_count();

  if (setting.mode == SliceMode::temporal) {
    parallel_for(n, workers, [&](std::size_t i) { process(i, slice_view(a.slices[i]), {}); });
    return a;
  }

  AccumulativeViewBuilder builder(g.vertex_count());
  std::size_t added = 0;
  if (cfg.warm_start && opts.communities) {
    // sequential: each slice starts from its predecessor's partition
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ev = a.slices[i].events;
      builder.add(ev.subspan(added));
      added = ev.size();
      const auto view = builder.view();
      process(i, view, i ? carry_membership(a.partitions[i - 1], view) : std::vector<std::uint32_t>{});
    }
    return a;
  }
  // independent slices: build views in order, analyse a batch at a time
  std::vector<SliceView> batch;
  std::size_t batch_start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ev = a.slices[i].events;
    builder.add(ev.subspan(added));
    added = ev.size();
    batch.push_back(builder.view());
    if (batch.size() == workers || i + 1 == n) {
      parallel_for(batch.size(), workers, [&](std::size_t k) { process(batch_start + k, batch[k], {}); });
      batch.clear();
      batch_start = i + 1;
    }
  }
  return a;
}

TimeSeries transition_series(const SliceAnalysis& a, SeriesKind kind) {
  switch (kind) {
    case SeriesKind::contacts: return a.contacts;
    case SeriesKind::users: return a.users;
    case SeriesKind::top_share: break;
  }
  TimeSeries ts{"top_share", {}, {}, a.spec};
  for (std::size_t i = 0; i < a.slices.size(); ++i) {
    const auto& shares = a.top_share[i];
    double v = 0.0;
    if (!shares.empty())
      v = std::min_element(shares.begin(), shares.end())->second;  // smallest fraction has the smallest share
    ts.push(a.slices[i].index, v);
  }
  if (!a.top_share.empty()) {
    for (const auto& shares : a.top_share)
      if (!shares.empty()) {
        const auto p = std::min_element(shares.begin(), shares.end())->first;
        ts.label = "top_" + format_number(p * 100.0) + "pct_share";
        break;
      }
  }
  return ts;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<SliceSummary> slice_summaries(const TemporalGraph& g, const SliceSpec& spec) {
  const auto slices = make_slices(g, spec);
  std::vector<SliceSummary> out;
  out.reserve(slices.size());
  auto row = [](const Slice& s, const SliceView& v) {
    return SliceSummary{s.index, s.interval, s.events.size(), v.active_count(), v.graph.edge_count(), s.partial};
  };
  if (spec.mode == SliceMode::temporal) {
    for (const auto& s : slices) out.push_back(row(s, slice_view(s)));
    return out;
  }
  AccumulativeViewBuilder builder(g.vertex_count());
  std::size_t added = 0;
  for (const auto& s : slices) {
    builder.add(s.events.subspan(added));
    added = s.events.size();
    out.push_back(SliceSummary{s.index, s.interval, s.events.size(), builder.active_count(), builder.edge_count(),
                               s.partial});
  }
  return out;
}

void write_slices_csv(std::ostream& out, const std::vector<SliceSummary>& rows) {
  out << "index,t_start,t_end,n_events,n_active_vertices,n_simple_edges,partial\n";
  for (const auto& r : rows)
    out << r.index << ',' << format_datetime(r.interval.start) << ',' << format_datetime(r.interval.end) << ','
        << r.n_events << ',' << r.n_active << ',' << r.n_edges << ',' << (r.partial ? 1 : 0) << '\n';
}

void write_series_csv(std::ostream& out, const SliceAnalysis& a) {
  out << "slice,start,end,contacts,users\n";
  for (std::size_t i = 0; i < a.slices.size(); ++i) {
    const auto& s = a.slices[i];
    out << s.index << ',' << format_datetime(s.interval.start) << ',' << format_datetime(s.interval.end) << ','
        << format_number(a.contacts.values[i]) << ',' << format_number(a.users.values[i]) << '\n';
  }
}

void write_topk_csv(std::ostream& out, const SliceAnalysis& a) {
  out << "slice,p,share\n";
  for (std::size_t i = 0; i < a.slices.size(); ++i)
    for (const auto& [p, share] : a.top_share[i])
      out << a.slices[i].index << ',' << format_number(p) << ',' << format_number(share) << '\n';
}

void write_clusters_csv(std::ostream& out, const SliceAnalysis& a, DecileRule rule) {
  out << "slice,vertices,communities,largest_size,largest_share,top_decile_share,quality,degenerate,jaccard_prev,"
         "identity_change\n";
  std::vector<LargestClusterStep> steps;
  if (a.setting.mode == SliceMode::accumulative) steps = track_largest_cluster(a.partitions);
  for (std::size_t i = 0; i < a.partitions.size(); ++i) {
    const auto& p = a.partitions[i];
    const double n = static_cast<double>(p.vertex_count());
    const auto largest = p.sizes.empty() ? 0 : p.sizes.front();
    out << p.slice_index << ',' << p.vertex_count() << ',' << p.community_count() << ',' << largest << ','
        << format_number(n > 0 ? static_cast<double>(largest) / n : 0.0) << ','
        << format_number(top_decile_fraction(p, rule)) << ',' << format_number(p.quality) << ','
        << (p.degenerate ? 1 : 0) << ',';
    if (!steps.empty() && steps[i].jaccard_prev) out << format_number(*steps[i].jaccard_prev);
    out << ',';
    if (!steps.empty() && steps[i].jaccard_prev) out << (steps[i].identity_change ? 1 : 0);
    out << '\n';
  }
}

void write_cluster_hist_csv(std::ostream& out, const ClusterSizeDistribution& d) {
  std::map<std::size_t, std::size_t> total;
  for (const auto& h : d.per_slice)
    for (const auto& [size, count] : h) total[size] += count;
  out << "size,mean_count,total_count\n";
  for (const auto& [size, mean] : d.mean_count) out << size << ',' << format_number(mean) << ',' << total[size] << '\n';
}

void write_degree_hist_csv(std::ostream& out, const SliceView& full) {
  const auto contacts = degree_distribution(full, DegreeMode::contacts);
  const auto unique = degree_distribution(full, DegreeMode::unique_neighbors);
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> rows;
  for (const auto& [k, c] : contacts) rows[k].first = c;
  for (const auto& [k, c] : unique) rows[k].second = c;
  out << "degree,count_contacts,count_unique_neighbors\n";
  for (const auto& [k, c] : rows) out << k << ',' << c.first << ',' << c.second << '\n';
}

void write_degree_logbin_csv(std::ostream& out, const SliceView& full) {
  out << "mode,lo,hi,count,density\n";
  for (auto mode : {DegreeMode::contacts, DegreeMode::unique_neighbors})
    for (const auto& b : log_binned(degree_distribution(full, mode)))
      out << to_string(mode) << ',' << format_number(b.lo) << ',' << format_number(b.hi) << ',' << b.count << ','
          << format_number(b.density) << '\n';
}

void write_annd_csv(std::ostream& out, const std::optional<AnndCurve>& curve) {
  out << "k,mean_knn,count\n";
  if (!curve) return;
  for (std::size_t i = 0; i < curve->degree.size(); ++i)
    out << curve->degree[i] << ',' << format_number(curve->mean_knn[i]) << ',' << curve->count[i] << '\n';
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_annd_scatter_csv(std::ostream& out, const std::vector<AnndPoint>& points, const TemporalGraph& g) {
  out << "user,k,knn\n";
  for (const auto& p : points)
    out << csv_cell(g.vertex_names[p.vertex]) << ',' << p.degree << ',' << format_number(p.knn) << '\n';
}

void write_membership_csv(std::ostream& out, const CommunityPartition& p, const TemporalGraph& g) {
  out << "user,community\n";
  for (std::size_t i = 0; i < p.membership.size(); ++i)
    out << csv_cell(g.vertex_names[p.vertices[i]]) << ',' << p.membership[i] << '\n';
}

json fit_json(const SampleHistogram& hist, std::size_t n_resamples, std::uint64_t seed, unsigned threads) {
  try {
    const auto fit = fit_power_law(hist);
    json j = {{"alpha", fit.alpha},   {"xmin", fit.xmin}, {"ks", fit.ks_statistic}, {"n_tail", fit.n_tail},
              {"n", fit.n},           {"loglik", fit.loglik}, {"n_resamples", n_resamples}, {"seed", seed},
              {"p_value", nullptr}};
    if (n_resamples > 0) j["p_value"] = goodness_of_fit(fit, hist, n_resamples, seed, threads).p_value;
    return j;
  } catch (const FitError& e) {
    const char* kind = e.kind() == FitError::Kind::insufficient_data ? "insufficient_data"
                       : e.kind() == FitError::Kind::degenerate       ? "degenerate"
                                                                      : "insufficient_support";
    return {{"error", kind}, {"reason", e.what()}};
  }
}

namespace {

struct TableWriter {
  fs::path dir;
  json tables = json::array();
  std::vector<std::string> warnings;
  bool complete = true;

  template <typename Fn>
  void emit(const std::string& name, Fn&& fn, const std::string& empty_reason = {}) {
    json entry = {{"name", name}};
    try {
      std::ostringstream ss;
      fn(ss);
      const auto bytes = ss.str();
      write_file(dir / name, bytes);
      entry["status"] = empty_reason.empty() ? "ok" : "empty";
      entry["bytes"] = bytes.size();
      entry["fnv1a64"] = hex64(fnv1a64(bytes));
      if (!empty_reason.empty()) {
        entry["note"] = empty_reason;
        warnings.push_back(name + ": " + empty_reason);
      }
    } catch (const std::exception& e) {
      entry["status"] = "missing";
      entry["error"] = e.what();
      complete = false;
      std::error_code ec;
      fs::remove(dir / name, ec);
    }
    tables.push_back(std::move(entry));
  }

  void emit_json(const std::string& name, const json& j) {
    emit(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }
};

json windows_json(const std::array<TimeInterval, 3>& w) {
  json j = json::object();
  for (std::size_t k = 0; k < 3; ++k)
    j[std::string(to_string(static_cast<Phase>(k)))] = {format_datetime(w[k].start), format_datetime(w[k].end)};
  return j;
}

SampleHistogram to_samples(const DegreeHistogram& h) {
  SampleHistogram s;
  for (const auto& [k, c] : h)
    if (k > 0) s[k] = c;
  return s;
}

}  // namespace

ReportResult run_report(const RunConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir))
    throw IoError("cannot create output directory " + cfg.out_dir.string() + (ec ? ": " + ec.message() : ""));

  const auto g = load_graph(cfg);
  const auto threads = cfg.worker_count();
  TableWriter w;
  w.dir = cfg.out_dir;

  json transitions = json::object();
  json fits = json::object();
  std::optional<std::size_t> primary;
  std::vector<SliceAnalysis> analyses;
  std::vector<std::optional<TransitionReport>> reports;

  for (std::size_t si = 0; si < cfg.slices.size(); ++si) {
    const auto& setting = cfg.slices[si];
    const auto label = setting.label();
    auto a = analyse_slices(g, setting, cfg, si);

    w.emit("fig4_series_" + label + ".csv", [&](std::ostream& o) { write_series_csv(o, a); });
    w.emit("fig7_topk_" + label + ".csv", [&](std::ostream& o) { write_topk_csv(o, a); });
    w.emit("fig6_clusters_" + label + ".csv", [&](std::ostream& o) { write_clusters_csv(o, a, cfg.decile); });
    w.emit("fig3_cluster_hist_" + label + ".csv",
           [&](std::ostream& o) { write_cluster_hist_csv(o, cluster_size_distribution(a.partitions)); });
    if (!a.partitions.empty())
      w.emit("communities_" + label + "_final.csv",
             [&](std::ostream& o) { write_membership_csv(o, a.partitions.back(), g); });

    SampleHistogram sizes;
    for (const auto& p : a.partitions)
      for (auto s : p.sizes) ++sizes[s];
    fits["cluster_sizes_" + label] = fit_json(sizes, cfg.n_resamples, derive_seed(cfg.seed, 1000 + si), threads);

    auto tcfg = cfg.transition;
    tcfg.difference = setting.mode == SliceMode::accumulative && cfg.transition_series != SeriesKind::top_share;
    std::optional<TransitionReport> report;
    try {
      report = detect_transition(transition_series(a, cfg.transition_series), tcfg);
      auto j = to_json(*report);
      j["windows"] = windows_json(phase_windows(*report, a.spec));
      j["delta_t"] = format_duration(setting.delta_t);
      j["mode"] = to_string(setting.mode);
      transitions[label] = std::move(j);
    } catch (const ArgumentError& e) {
      transitions[label] = {{"error", e.what()}};
      w.warnings.push_back("transition " + label + ": " + e.what());
    }
    if (!primary && setting.mode == SliceMode::temporal && report) primary = si;
    reports.push_back(std::move(report));
    analyses.push_back(std::move(a));
  }
  if (!primary)
    for (std::size_t si = 0; si < reports.size() && !primary; ++si)
      if (reports[si]) primary = si;

  const auto full = slice_view(g.events);
  w.emit("fig3_degree_hist.csv", [&](std::ostream& o) { write_degree_hist_csv(o, full); });
  w.emit("fig3_degree_logbin.csv", [&](std::ostream& o) { write_degree_logbin_csv(o, full); });
  fits["degree_contacts"] =
      fit_json(to_samples(degree_distribution(full, DegreeMode::contacts)), cfg.n_resamples, derive_seed(cfg.seed, 2000), threads);
  fits["degree_unique_neighbors"] = fit_json(to_samples(degree_distribution(full, DegreeMode::unique_neighbors)),
                                             cfg.n_resamples, derive_seed(cfg.seed, 2001), threads);

  // ANND per phase, phases taken from the primary (first temporal) setting
  std::optional<PhaseAnnd> phases;
  std::string phase_note;
  if (primary) {
    phases = annd_by_phase(g, *reports[*primary], analyses[*primary].spec);
    transitions[cfg.slices[*primary].label()]["phase_warnings"] = phases->warnings;
  } else {
    phase_note = "no transition report available";
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const auto name = std::string(to_string(static_cast<Phase>(k)));
    const bool have = phases && phases->curves[k];
    const auto note = have ? std::string{} : (phases ? name + " phase has no contacts" : phase_note);
    w.emit("fig5_annd_" + name + ".csv",
           [&](std::ostream& o) { write_annd_csv(o, phases ? phases->curves[k] : std::nullopt); }, note);
    w.emit("fig5_annd_scatter_" + name + ".csv",
           [&](std::ostream& o) {
             write_annd_scatter_csv(o, phases ? phases->scatter[k] : std::vector<AnndPoint>{}, g);
           },
           note);
  }

  json tj = {{"primary", primary ? json(cfg.slices[*primary].label()) : json(nullptr)}, {"settings", transitions}};
  w.emit_json("transition.json", tj);
  w.emit_json("fits.json", fits);

  json manifest = {{"config", cfg.semantic_json()},
                   {"config_hash", cfg.hash()},
                   {"graph",
                    {{"events", g.event_count()},
                     {"users", g.vertex_count()},
                     {"t0", format_datetime(g.t0)},
                     {"horizon", format_datetime(g.horizon)}}},
                   {"tables", w.tables},
                   {"warnings", w.warnings},
                   {"complete", w.complete}};
  ReportResult result{manifest, w.complete};
  try {
    write_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError&) {
    result.complete = false;
    throw;
  }
  return result;
}

}  // namespace wildfire
