#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wildfire/graph.hpp"
#include "wildfire/slicing.hpp"

namespace wildfire {

enum class DegreeMode {
  contacts,          // incident contact events (multigraph degree)
  unique_neighbors,  // |N(v)|
};

std::string_view to_string(DegreeMode mode);

/// 0 for vertices not active in the view.
std::uint64_t degree_centrality(const SliceView& view, VertexId vertex, DegreeMode mode);

struct TimeSeries {
  std::string label;
  std::vector<std::size_t> slice_index;
  std::vector<double> values;
  std::optional<SliceSpec> spec;

  std::size_t size() const { return values.size(); }
  void push(std::size_t index, double value) {
    slice_index.push_back(index);
    values.push_back(value);
  }
};

/// contacts[i] = events in slice i, users[i] = distinct endpoints in slice i.
std::pair<TimeSeries, TimeSeries> contact_user_series(std::span<const Slice> slices);

struct AnndCurve {
  std::vector<std::size_t> degree;
  std::vector<double> mean_knn;
  std::vector<std::size_t> count;

  bool empty() const { return degree.empty(); }
};

struct AnndPoint {
  VertexId vertex;  // local id in the graph
  std::size_t degree;
  double knn;
};

/// Average nearest-neighbour degree per degree class on the simple graph.
/// Isolated vertices are skipped. Throws ArgumentError("no degree classes")
/// for an edgeless graph.
AnndCurve annd_curve(const SimpleGraph& graph);

/// Per-vertex (k, k_nn) for every non-isolated vertex, by vertex id.
std::vector<AnndPoint> annd_scatter(const SimpleGraph& graph);

/// For each fraction p in (0, 1]: share of contact endpoints held by the
/// ceil(p·n_active) most active vertices, i.e. Σ top contact degrees /
/// (2·n_events). Ties rank by ascending vertex id. Throws ArgumentError on
/// an empty view or a fraction outside (0, 1].
std::vector<std::pair<double, double>> top_active_fraction(const SliceView& view, std::span<const double> fractions);

using DegreeHistogram = std::map<std::uint64_t, std::uint64_t>;

/// Exact degree -> vertex count over active vertices.
DegreeHistogram degree_distribution(const SliceView& view, DegreeMode mode);
DegreeHistogram degree_distribution(const SimpleGraph& graph);

struct LogBin {
  double lo;  // inclusive
  double hi;  // exclusive
  std::uint64_t count;
  double density;  // count / (number of integers in [lo, hi)) / total
};

/// Logarithmic bins with `bins_per_decade` bins per factor of ten, starting
/// at 1. Empty bins are omitted.
std::vector<LogBin> log_binned(const DegreeHistogram& hist, int bins_per_decade = 5);

}  // namespace wildfire
