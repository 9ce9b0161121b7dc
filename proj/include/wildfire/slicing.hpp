#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wildfire/graph.hpp"
#include "wildfire/ingest.hpp"

namespace wildfire {

enum class SliceMode { temporal, accumulative };

std::string_view to_string(SliceMode mode);
SliceMode parse_slice_mode(std::string_view name);

struct SliceSpec {
  SliceMode mode = SliceMode::temporal;
  Duration delta_t = 4 * 3600;
  Timestamp t0 = 0;
  Timestamp horizon = 0;

  /// Throws ArgumentError unless delta_t > 0 and horizon > t0.
  void validate() const;
  /// ceil((horizon - t0) / delta_t)
  std::size_t slice_count() const;
  /// Window covered by the events *added* in 1-based slice i:
  /// [t0 + (i-1)·Δt, min(t0 + i·Δt, horizon)).
  TimeInterval step_interval(std::size_t index) const;
  /// Window of the slice itself; accumulative slices start at t0.
  TimeInterval interval(std::size_t index) const;
};

/// One static snapshot. `events` views the owning TemporalGraph, which must
/// outlive the slice.
struct Slice {
  std::size_t index = 0;  // 1-based
  SliceMode mode = SliceMode::temporal;
  TimeInterval interval;
  bool partial = false;  // final slice shorter than Δt
  std::size_t first_event = 0;
  std::span<const ContactEvent> events;
};

/// L slices partitioning the event list by [t_start, t_end). Throws
/// ArgumentError for delta_t <= 0.
std::vector<Slice> temporal_slices(const TemporalGraph& g, Duration delta_t);

/// Slice i holds every event with t < t0 + i·Δt; the last one is all of G↓.
std::vector<Slice> accumulative_slices(const TemporalGraph& g, Duration delta_t);

std::vector<Slice> make_slices(const TemporalGraph& g, const SliceSpec& spec);

SliceSpec spec_for(const TemporalGraph& g, SliceMode mode, Duration delta_t);

/// Static undirected views of a slice. Local vertex id i corresponds to the
/// global vertex active[i]; active is sorted ascending.
struct SliceView {
  std::vector<VertexId> active;
  SimpleGraph graph;                    // pair-merged contacts, weight = contact count
  std::vector<std::uint64_t> contacts;  // multigraph degree per local vertex
  std::size_t n_events = 0;

  std::optional<VertexId> local_index(VertexId global) const;
  std::size_t active_count() const { return active.size(); }
};

SliceView slice_view(std::span<const ContactEvent> events);
inline SliceView slice_view(const Slice& slice) { return slice_view(slice.events); }

/// Maintains the accumulated view under appended event batches, so each
/// accumulative snapshot costs O(E + V) instead of a full rebuild.
class AccumulativeViewBuilder {
 public:
  explicit AccumulativeViewBuilder(std::size_t vertex_count);

  void add(std::span<const ContactEvent> delta);
  SliceView view() const;

  std::size_t n_events() const { return n_events_; }
  std::size_t edge_count() const { return pair_keys_.size(); }
  std::size_t active_count() const { return active_.size(); }

 private:
  std::vector<std::uint64_t> pair_keys_;  // (min << 32) | max, sorted
  std::vector<std::uint32_t> pair_counts_;
  std::vector<std::uint64_t> contacts_;   // by global id
  std::vector<VertexId> active_;          // sorted
  std::size_t n_events_ = 0;
};

}  // namespace wildfire
