#include "wildfire/graph.hpp"

#include <algorithm>
#include <string>

namespace wildfire {

SimpleGraph SimpleGraph::from_edges(std::size_t vertex_count, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.u == e.v) throw ArgumentError("self-loop in simple graph input");
    if (e.u >= vertex_count || e.v >= vertex_count) throw ArgumentError("edge endpoint out of range");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < edges.size(); ++r) {
    if (w > 0 && edges[w - 1].u == edges[r].u && edges[w - 1].v == edges[r].v) {
      edges[w - 1].weight += edges[r].weight;
    } else {
      edges[w++] = edges[r];
    }
  }
  edges.resize(w);
  return from_sorted_unique(vertex_count, edges);
}

SimpleGraph SimpleGraph::from_sorted_unique(std::size_t vertex_count, std::span<const Edge> edges) {
  SimpleGraph g;
  g.offsets_.assign(vertex_count + 1, 0);
  for (const auto& e : edges) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < vertex_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.neighbors_.resize(2 * edges.size());
  g.weights_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // smaller neighbours first, then larger: adjacency lists stay ascending
  for (const auto& e : edges) {
    auto slot = cursor[e.v]++;
    g.neighbors_[slot] = e.u;
    g.weights_[slot] = e.weight;
  }
  for (const auto& e : edges) {
    auto slot = cursor[e.u]++;
    g.neighbors_[slot] = e.v;
    g.weights_[slot] = e.weight;
  }
  return g;
}

std::vector<SimpleGraph::Edge> SimpleGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (VertexId u = 0; u < vertex_count(); ++u) {
    auto nb = neighbors(u);
    auto w = weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (u < nb[i]) out.push_back({u, nb[i], w[i]});
  }
  return out;
}

}  // namespace wildfire
