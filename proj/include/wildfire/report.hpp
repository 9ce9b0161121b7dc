#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wildfire/community.hpp"
#include "wildfire/ingest.hpp"
#include "wildfire/metrics.hpp"
#include "wildfire/powerlaw.hpp"
#include "wildfire/slicing.hpp"
#include "wildfire/transition.hpp"

namespace wildfire {

struct SliceSetting {
  SliceMode mode = SliceMode::temporal;
  Duration delta_t = 4 * 3600;

  /// "temporal_4h"; used in output file names.
  std::string label() const;
};

enum class SeriesKind { contacts, users, top_share };
std::string_view to_string(SeriesKind k);
SeriesKind parse_series_kind(std::string_view name);

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::optional<InputFormat> format;  // guessed from the extension when absent
  Timestamp t0 = 1580515200;          // 2020-02-01T00:00:00Z
  Timestamp horizon = 1589155200;     // 2020-05-11T00:00:00Z
  std::vector<SliceSetting> slices = {{SliceMode::temporal, 4 * 3600}, {SliceMode::accumulative, 86400}};
  Objective objective = Objective::modularity;
  double resolution = 1.0;
  bool weighted = false;
  /// Each accumulative slice starts Leiden from the previous slice's partition.
  bool warm_start = true;
  std::uint64_t seed = 42;
  TransitionConfig transition;
  SeriesKind transition_series = SeriesKind::contacts;
  std::vector<double> percents = {0.02, 0.05, 0.10, 0.20};
  DecileRule decile = DecileRule::by_count;
  std::size_t n_resamples = 100;
  bool deduplicate = true;
  std::filesystem::path out_dir = "report";
  unsigned threads = 0;  // 0: available parallelism
  bool use_cache = true;

  /// Throws ArgumentError on an unusable configuration.
  void validate() const;
  /// Every semantically relevant setting; excludes threads, caching and the output directory.
  nlohmann::json semantic_json() const;
  /// FNV-1a 64 of semantic_json().dump(), as 16 hex digits.
  std::string hash() const;
  unsigned worker_count() const;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct LoadStats {
  ParseStats parse;
  std::uint64_t duplicates_removed = 0;
  std::uint64_t out_of_window = 0;
  bool from_cache = false;
};

/// Reads the inputs into G↓. Canonical event files are read directly; raw
/// inputs are parsed, deduplicated (optionally) and clipped to [t0, horizon).
/// With caching on, a single raw input is cached as "<input>.wfev" and the
/// cache is reused while the input's size, mtime and window are unchanged.
TemporalGraph load_graph(const RunConfig& cfg, LoadStats* stats = nullptr);

nlohmann::json to_json(const LoadStats& s, const TemporalGraph& g);

/// Per-slice results of one slice setting.
struct SliceAnalysis {
  SliceSetting setting;
  SliceSpec spec;
  std::vector<Slice> slices;
  TimeSeries contacts, users;
  std::vector<std::vector<std::pair<double, double>>> top_share;  // per slice; empty for an empty slice
  std::vector<CommunityPartition> partitions;
};

struct AnalysisOptions {
  bool communities = true;
  bool top_share = true;
};

SliceAnalysis analyse_slices(const TemporalGraph& g, const SliceSetting& setting, const RunConfig& cfg,
                             std::size_t setting_index, AnalysisOptions opts = {});

/// Series the transition detector reads. top_share uses the smallest
/// configured percentage.
TimeSeries transition_series(const SliceAnalysis& a, SeriesKind kind);

/// CSV writers; numbers use a fixed shortest-round-trip format.
std::string format_number(double v);
void write_series_csv(std::ostream& out, const SliceAnalysis& a);
/// Long format: slice,p,share; empty slices have no rows.
void write_topk_csv(std::ostream& out, const SliceAnalysis& a);
void write_clusters_csv(std::ostream& out, const SliceAnalysis& a, DecileRule rule);
void write_cluster_hist_csv(std::ostream& out, const ClusterSizeDistribution& d);
void write_degree_hist_csv(std::ostream& out, const SliceView& full);
void write_degree_logbin_csv(std::ostream& out, const SliceView& full);
void write_annd_csv(std::ostream& out, const std::optional<AnndCurve>& curve);
void write_annd_scatter_csv(std::ostream& out, const std::vector<AnndPoint>& points, const TemporalGraph& g);
void write_membership_csv(std::ostream& out, const CommunityPartition& p, const TemporalGraph& g);
struct SliceSummary {
  std::size_t index = 0;
  TimeInterval interval;
  std::size_t n_events = 0;
  std::size_t n_active = 0;
  std::size_t n_edges = 0;
  bool partial = false;
};

std::vector<SliceSummary> slice_summaries(const TemporalGraph& g, const SliceSpec& spec);
void write_slices_csv(std::ostream& out, const std::vector<SliceSummary>& rows);

/// {alpha, xmin, ks, n_tail, n, loglik, p_value, n_resamples, seed} or {error, reason}.
nlohmann::json fit_json(const SampleHistogram& hist, std::size_t n_resamples, std::uint64_t seed, unsigned threads);

struct ReportResult {
  nlohmann::json manifest;
  bool complete = true;
};

/// Runs the whole pipeline and writes every table plus manifest.json into
/// cfg.out_dir. A table that fails is recorded as missing in the manifest and
/// makes the result incomplete; the other tables are still written.
ReportResult run_report(const RunConfig& cfg);

}  // namespace wildfire
