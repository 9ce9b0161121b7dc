#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wildfire/graph.hpp"
#include "wildfire/metrics.hpp"
#include "wildfire/slicing.hpp"

namespace wildfire {

enum class Objective { modularity, cpm };

std::string_view to_string(Objective o);
Objective parse_objective(std::string_view name);

struct LeidenOptions {
  Objective objective = Objective::modularity;
  double resolution = 1.0;
  std::uint64_t seed = 42;
  /// Use contact counts as edge weights instead of 1.
  bool weighted = false;
  /// Full Leiden iterations; stops earlier once an iteration changes nothing
  /// or no longer improves the objective.
  int max_iterations = 2;
  /// Refinement temperature: merge probability ∝ exp(gain / randomness).
  double randomness = 0.01;
  /// Optional starting membership, one entry per vertex.
  std::vector<std::uint32_t> initial;
};

/// Community assignment of one graph. Communities are numbered 0..K-1 by
/// descending size; equal sizes order by their smallest member.
struct CommunityPartition {
  std::size_t slice_index = 0;
  std::optional<SliceMode> mode;
  /// Global vertex id of each local vertex (identity for plain graphs).
  std::vector<VertexId> vertices;
  std::vector<std::uint32_t> membership;  // by local vertex
  std::vector<std::size_t> sizes;         // by community id, descending
  Objective objective = Objective::modularity;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  double quality = 0.0;
  std::vector<double> quality_trace;  // after each Leiden iteration
  std::size_t isolated = 0;           // degree-0 vertices, placed in singleton communities
  bool degenerate = false;            // edgeless input

  std::size_t community_count() const { return sizes.size(); }
  std::size_t vertex_count() const { return membership.size(); }
  /// Sorted global ids of the members of community c.
  std::vector<VertexId> members(std::uint32_t c) const;
};

/// Leiden community detection (local moving, refinement, aggregation),
/// repeated until an iteration leaves the partition unchanged. Every returned
/// community induces a connected subgraph. Deterministic given the options.
CommunityPartition leiden_partition(const SimpleGraph& graph, const LeidenOptions& options);

/// Runs Leiden on a slice view; vertices are the view's global ids.
CommunityPartition partition_view(const SliceView& view, std::size_t slice_index, SliceMode mode,
                                  const LeidenOptions& options);

/// Objective value of an arbitrary membership vector on the graph.
double partition_quality(const SimpleGraph& graph, std::span<const std::uint32_t> membership, Objective objective,
                         double resolution, bool weighted = false);

/// Per-slice seed derived from the root seed and the slice index.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Component label per vertex (labels in order of smallest member).
std::vector<std::uint32_t> component_labels(const SimpleGraph& graph);
/// Component sizes, largest first.
std::vector<std::size_t> connected_components(const SimpleGraph& graph);

struct ClusterSizeDistribution {
  std::map<std::size_t, double> mean_count;                   // size -> occurrences / number of slices
  std::vector<std::map<std::size_t, std::size_t>> per_slice;  // raw histograms
};

ClusterSizeDistribution cluster_size_distribution(std::span<const CommunityPartition> partitions);

/// Largest community size over the slice's vertex count (0 for an empty slice).
TimeSeries largest_cluster_series(std::span<const CommunityPartition> partitions);

enum class DecileRule {
  by_count,       // the ceil(0.1·K) largest communities
  by_percentile,  // communities at or above the 90th size percentile
};

double top_decile_fraction(const CommunityPartition& partition, DecileRule rule = DecileRule::by_count);
TimeSeries top_decile_cluster_fraction(std::span<const CommunityPartition> partitions,
                                       DecileRule rule = DecileRule::by_count);

struct LargestClusterStep {
  std::size_t slice_index = 0;
  std::uint32_t community_id = 0;
  std::size_t size = 0;
  std::optional<double> jaccard_prev;  // absent for the first slice
  bool identity_change = false;        // jaccard_prev < 0.5
};

double jaccard(std::span<const VertexId> a, std::span<const VertexId> b);

/// Streaming form of track_largest_cluster.
class LargestClusterTracker {
 public:
  LargestClusterStep push(const CommunityPartition& partition);

 private:
  std::vector<VertexId> previous_;
  bool has_previous_ = false;
};

/// Membership overlap of consecutive largest communities. Throws
/// ArgumentError for temporal-mode partitions, whose vertex sets are not
/// comparable between slices.
std::vector<LargestClusterStep> track_largest_cluster(std::span<const CommunityPartition> partitions);

}  // namespace wildfire
