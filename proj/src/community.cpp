#include <algorithm>
#include <cmath>
#include <numeric>

#include "wildfire/community.hpp"

namespace wildfire {

std::vector<VertexId> CommunityPartition::members(std::uint32_t c) const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < membership.size(); ++v)
    if (membership[v] == c) out.push_back(vertices.empty() ? static_cast<VertexId>(v) : vertices[v]);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> rank;

  explicit DisjointSets(std::size_t n) : parent(n), rank(n, 0) { std::iota(parent.begin(), parent.end(), 0u); }

  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  }
};

}  // namespace

std::vector<std::uint32_t> component_labels(const SimpleGraph& graph) {
  const auto n = graph.vertex_count();
  DisjointSets sets(n);
  for (VertexId v = 0; v < n; ++v)
    for (auto u : graph.neighbors(v))
      if (v < u) sets.unite(v, u);
  std::vector<std::uint32_t> label(n);
  std::vector<std::uint32_t> root_label(n, UINT32_MAX);
  std::uint32_t next = 0;
  for (VertexId v = 0; v < n; ++v) {
    auto& l = root_label[sets.find(v)];
    if (l == UINT32_MAX) l = next++;
    label[v] = l;
  }
  return label;
}

std::vector<std::size_t> connected_components(const SimpleGraph& graph) {
  const auto labels = component_labels(graph);
  std::vector<std::size_t> sizes;
  for (auto l : labels) {
    if (l >= sizes.size()) sizes.resize(l + 1, 0);
    ++sizes[l];
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

ClusterSizeDistribution cluster_size_distribution(std::span<const CommunityPartition> partitions) {
  ClusterSizeDistribution out;
  if (partitions.empty()) throw ArgumentError("cluster size distribution needs at least one partition");
  std::map<std::size_t, std::size_t> total;
  for (const auto& p : partitions) {
    std::map<std::size_t, std::size_t> hist;
    for (auto s : p.sizes) ++hist[s];
    for (const auto& [size, count] : hist) total[size] += count;
    out.per_slice.push_back(std::move(hist));
  }
  const auto slices = static_cast<double>(partitions.size());
  for (const auto& [size, count] : total) out.mean_count[size] = static_cast<double>(count) / slices;
  return out;
}

TimeSeries largest_cluster_series(std::span<const CommunityPartition> partitions) {
  TimeSeries ts{"largest_cluster_rel_size", {}, {}, std::nullopt};
  for (const auto& p : partitions) {
    const double n = static_cast<double>(p.vertex_count());
    ts.push(p.slice_index, p.sizes.empty() || n == 0.0 ? 0.0 : static_cast<double>(p.sizes.front()) / n);
  }
  return ts;
}

double top_decile_fraction(const CommunityPartition& p, DecileRule rule) {
  if (p.sizes.empty() || p.vertex_count() == 0) return 0.0;
  const auto k = p.sizes.size();
  std::size_t covered = 0;
  if (rule == DecileRule::by_count) {
    const auto top = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(k) - 1e-9));
    for (std::size_t i = 0; i < std::max<std::size_t>(top, 1); ++i) covered += p.sizes[i];
  } else {
    // nearest-rank 90th percentile of the ascending size list
    std::vector<std::size_t> asc(p.sizes.rbegin(), p.sizes.rend());
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(k) - 1e-9));
    const auto threshold = asc[std::clamp<std::size_t>(rank, 1, k) - 1];
    for (auto s : p.sizes)
      if (s >= threshold) covered += s;
  }
  return static_cast<double>(covered) / static_cast<double>(p.vertex_count());
}

TimeSeries top_decile_cluster_fraction(std::span<const CommunityPartition> partitions, DecileRule rule) {
  TimeSeries ts{"top_decile_cluster_fraction", {}, {}, std::nullopt};
  for (const auto& p : partitions) ts.push(p.slice_index, top_decile_fraction(p, rule));
  return ts;
}

double jaccard(std::span<const VertexId> a, std::span<const VertexId> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

LargestClusterStep LargestClusterTracker::push(const CommunityPartition& p) {
  if (p.mode == SliceMode::temporal)
    throw ArgumentError(
        "largest-cluster tracking needs accumulative slices: temporal slices drop inactive users, so community "
        "memberships are not comparable between slices");
  LargestClusterStep step;
  step.slice_index = p.slice_index;
  step.community_id = 0;
  std::vector<VertexId> current;
  if (!p.sizes.empty()) {
    step.size = p.sizes.front();
    current = p.members(0);
  }
  if (has_previous_) {
    step.jaccard_prev = jaccard(previous_, current);
    step.identity_change = *step.jaccard_prev < 0.5;
  }
  previous_ = std::move(current);
  has_previous_ = true;
  return step;
}

std::vector<LargestClusterStep> track_largest_cluster(std::span<const CommunityPartition> partitions) {
  LargestClusterTracker tracker;
  std::vector<LargestClusterStep> steps;
  steps.reserve(partitions.size());
  for (const auto& p : partitions) steps.push_back(tracker.push(p));
  return steps;
}

}  // namespace wildfire
