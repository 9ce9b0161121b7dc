#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wildfire/types.hpp"

namespace wildfire {

/// Undirected simple graph in CSR form over local vertex ids 0..n-1.
/// Every edge {u,v} appears in both adjacency lists; no self-loops, no
/// parallel edges. `weight` holds how many contacts were merged into the edge.
class SimpleGraph {
 public:
  struct Edge {
    VertexId u;
    VertexId v;
    std::uint32_t weight;
  };

  SimpleGraph() : offsets_(1, 0) {}

  /// Edges must satisfy u != v; duplicates (in either orientation) merge
  /// and their weights add.
  static SimpleGraph from_edges(std::size_t vertex_count, std::vector<Edge> edges);

  /// Edges sorted by (u, v) with u < v and no duplicates; skips the sort.
  static SimpleGraph from_sorted_unique(std::size_t vertex_count, std::span<const Edge> edges);

  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {neighbors_.data() + offsets_[v], degree(v)};
  }
  std::span<const std::uint32_t> weights(VertexId v) const {
    return {weights_.data() + offsets_[v], degree(v)};
  }

  /// Each undirected edge once, u < v, sorted.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> neighbors_;
  std::vector<std::uint32_t> weights_;
};

}  // namespace wildfire
