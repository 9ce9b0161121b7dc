#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wildfire/ingest.hpp"
#include "wildfire/metrics.hpp"
#include "wildfire/slicing.hpp"

namespace wildfire {

struct TransitionConfig {
  std::size_t baseline_window = 42;  // w_b
  double ramp_factor = 3.0;          // r
  std::size_t sustain = 6;           // w_s
  /// The transition ends once the trailing-mean growth per slice drops below this.
  double decay = 0.1;
  double spike_z = 5.0;
  std::size_t local_window = 42;
  /// Run on first differences (for cumulative series such as accumulative slices).
  bool difference = false;
};

/// Half-open range of 1-based slice numbers.
struct SliceRange {
  std::size_t begin = 1;
  std::size_t end = 1;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return size() == 0; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

struct Precursor {
  std::size_t slice = 0;  // peak of the run
  std::size_t first = 0;
  std::size_t last = 0;
  double value = 0.0;
  double local_median = 0.0;
  double z = 0.0;  // +inf when the local spread is zero
  /// value / local median (+inf for a zero median)
  double magnitude() const;
};

enum class Phase { pre = 0, during = 1, post = 2 };
std::string_view to_string(Phase p);

struct TransitionReport {
  std::string series;
  std::size_t length = 0;  // L
  bool transition = false;
  /// L + 1 when no transition was found.
  std::size_t onset_slice = 1;
  std::size_t end_slice = 1;
  std::vector<Precursor> precursors;
  std::array<SliceRange, 3> phases;
  TransitionConfig config;

  std::vector<std::size_t> precursor_slices() const;
  const SliceRange& phase(Phase p) const { return phases[static_cast<std::size_t>(p)]; }
};

/// Onset: first slice whose trailing sustain-window mean exceeds ramp_factor
/// times the median of the baseline_window slices preceding that window, and
/// stays so for sustain consecutive slices. End: first later slice where the
/// trailing mean grows by less than `decay` relative to the slice before.
/// Precursors are detected on the slices before onset. All comparisons are
/// ratios, so positive rescaling of the series leaves the report unchanged.
/// Throws ArgumentError for negative/non-finite values or a series shorter
/// than baseline_window + sustain.
TransitionReport detect_transition(const TimeSeries& series, const TransitionConfig& cfg = {});
TransitionReport detect_transition(std::span<const double> values, const TransitionConfig& cfg = {});

/// Local spikes: value above the rolling median of the surrounding
/// local_window slices (the slice itself excluded) by at least spike_z robust
/// standard deviations. Consecutive flagged slices form one run. Only slices
/// in [1, before) are considered. Throws ArgumentError if the series is
/// shorter than local_window.
std::vector<Precursor> detect_precursors(std::span<const double> values, const TransitionConfig& cfg,
                                         std::size_t before);

/// pre/during/post as absolute time intervals; slice i starts at t0 + (i-1)·Δt.
/// Without a transition pre spans everything and the others are empty.
std::array<TimeInterval, 3> phase_windows(const TransitionReport& report, const SliceSpec& spec);

struct PhaseAnnd {
  std::array<TimeInterval, 3> windows;
  std::array<std::optional<AnndCurve>, 3> curves;
  std::array<std::vector<AnndPoint>, 3> scatter;
  std::vector<std::string> warnings;
};

/// One static graph per phase window from the events inside it; empty phases
/// are omitted with a warning.
PhaseAnnd annd_by_phase(const TemporalGraph& g, const TransitionReport& report, const SliceSpec& spec);

nlohmann::json to_json(const TransitionConfig& cfg);
nlohmann::json to_json(const TransitionReport& report);

}  // namespace wildfire
