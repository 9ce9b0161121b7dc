#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "wildfire/community.hpp"

namespace wildfire {

std::string_view to_string(Objective o) { return o == Objective::modularity ? "modularity" : "cpm"; }

Objective parse_objective(std::string_view name) {
  if (name == "modularity") return Objective::modularity;
  if (name == "cpm" || name == "CPM") return Objective::cpm;
  throw ArgumentError("unknown objective '" + std::string(name) + "' (expected modularity or cpm)");
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  // splitmix64 finaliser over the combined input
  std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

using Rng = std::mt19937_64;

/// Weighted graph used across aggregation levels. Self-loops are kept apart
/// from the adjacency lists.
struct LevelGraph {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;
  std::vector<double> self_loop;
  std::vector<double> node_weight;  // strength (modularity) or size (cpm)

  std::size_t size() const { return self_loop.size(); }
};

struct Scale {
  double resolution;
  double factor;  // 1/(2m) for modularity, 1 for cpm
  double penalty(double a, double b) const { return resolution * a * b * factor; }
};

LevelGraph base_graph(const SimpleGraph& g, Objective objective, bool weighted) {
  LevelGraph lg;
  const auto n = g.vertex_count();
  lg.offsets.resize(n + 1, 0);
  lg.self_loop.assign(n, 0.0);
  lg.node_weight.assign(n, 0.0);
  lg.targets.reserve(2 * g.edge_count());
  lg.weights.reserve(2 * g.edge_count());
  for (VertexId v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    const auto w = g.weights(v);
    double strength = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const double ew = weighted ? static_cast<double>(w[i]) : 1.0;
      lg.targets.push_back(nb[i]);
      lg.weights.push_back(ew);
      strength += ew;
    }
    lg.offsets[v + 1] = lg.targets.size();
    lg.node_weight[v] = objective == Objective::modularity ? strength : 1.0;
  }
  return lg;
}

/// Renumbers labels to 0..k-1 in order of first occurrence; returns k.
std::uint32_t compact(std::vector<std::uint32_t>& labels) {
  std::vector<std::uint32_t> map(labels.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& l : labels) {
    if (l >= map.size()) map.resize(l + 1, UINT32_MAX);
    if (map[l] == UINT32_MAX) map[l] = next++;
    l = map[l];
  }
  return next;
}

std::vector<std::uint32_t> random_order(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

/// Queue-based local moving. `membership` ids must be < g.size(). Returns
/// true if any node changed community.
bool move_nodes(const LevelGraph& g, std::vector<std::uint32_t>& membership, const Scale& scale, Rng& rng) {
  const auto n = g.size();
  std::vector<double> comm_weight(n, 0.0);
  std::vector<std::uint32_t> comm_count(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    comm_weight[membership[v]] += g.node_weight[v];
    ++comm_count[membership[v]];
  }
  std::vector<std::uint32_t> empty;
  for (std::size_t c = n; c-- > 0;)
    if (comm_count[c] == 0) empty.push_back(static_cast<std::uint32_t>(c));

  std::vector<std::uint32_t> queue = random_order(n, rng);
  std::vector<char> queued(n, 1);
  std::size_t head = 0;
  std::size_t pending = n;
  queue.resize(n);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool moved_any = false;

  while (pending > 0) {
    const auto v = queue[head];
    head = (head + 1) % n;
    --pending;
    queued[v] = 0;

    const auto current = membership[v];
    touched.clear();
    for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      const auto c = membership[g.targets[i]];
      if (link[c] == 0.0) touched.push_back(c);
      link[c] += g.weights[i];
    }
    const double a = g.node_weight[v];
    comm_weight[current] -= a;
    --comm_count[current];

    std::uint32_t best = current;
    double best_gain = link[current] - scale.penalty(a, comm_weight[current]);
    for (auto c : touched) {
      const double gain = link[c] - scale.penalty(a, comm_weight[c]);
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best = c;
      }
    }
    // a fresh community has gain exactly 0
    if (comm_count[current] > 0 && best_gain < -1e-12 && !empty.empty()) {
      best = empty.back();
      empty.pop_back();
    }

    for (auto c : touched) link[c] = 0.0;
    link[current] = 0.0;

    comm_weight[best] += a;
    ++comm_count[best];
    if (best != current && comm_count[current] == 0) empty.push_back(current);

    if (best != current) {
      membership[v] = best;
      moved_any = true;
      for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        const auto u = g.targets[i];
        if (!queued[u] && membership[u] != best) {
          queued[u] = 1;
          queue[(head + pending) % n] = u;
          ++pending;
        }
      }
    }
  }
  return moved_any;
}

/// Leiden refinement: merges singletons inside each community of
/// `membership` into well-connected sub-communities, at random with
/// probability ∝ exp(gain / theta) over non-negative gains.
std::vector<std::uint32_t> refine(const LevelGraph& g, const std::vector<std::uint32_t>& membership, const Scale& scale,
                                  double theta, Rng& rng) {
  const auto n = g.size();
  std::vector<std::uint32_t> refined(n);
  std::iota(refined.begin(), refined.end(), 0u);
  std::vector<double> refined_weight(g.node_weight);
  std::vector<std::uint32_t> refined_count(n, 1);
  std::vector<double> comm_total(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) comm_total[membership[v]] += g.node_weight[v];

  // weight from the node (later: refined community) to the rest of its community
  std::vector<double> external(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i)
      if (g.targets[i] != v && membership[g.targets[i]] == membership[v]) external[v] += g.weights[i];
  std::vector<double> node_external = external;

  std::vector<double> link(n, 0.0);
  std::vector<char> linked(n, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> candidates;
  std::vector<double> cumulative;
  std::vector<double> gains;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (auto v : random_order(n, rng)) {
    if (refined_count[refined[v]] != 1) continue;
    const auto c = membership[v];
    const double a = g.node_weight[v];
    if (node_external[v] < scale.penalty(a, comm_total[c] - a)) continue;

    touched.clear();
    for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      const auto u = g.targets[i];
      if (u == v || membership[u] != c) continue;
      const auto r = refined[u];
      if (!linked[r]) {
        linked[r] = 1;
        touched.push_back(r);
      }
      link[r] += g.weights[i];
    }

    candidates.clear();
    cumulative.clear();
    gains.clear();
    double max_gain = 0.0;
    for (auto r : touched) {
      const double w = refined_weight[r];
      const bool well_connected = external[r] >= scale.penalty(w, comm_total[c] - w);
      const double gain = link[r] - scale.penalty(a, w);
      if (well_connected && gain >= 0.0) {
        candidates.push_back(r);
        gains.push_back(gain);
        max_gain = std::max(max_gain, gain);
      }
    }
    std::uint32_t chosen = refined[v];
    if (!candidates.empty()) {
      // staying alone has gain 0
      double total = std::exp((0.0 - max_gain) / theta);
      const double stay = total;
      for (double gain : gains) {
        total += std::exp((gain - max_gain) / theta);
        cumulative.push_back(total);
      }
      const double x = unit(rng) * total;
      if (x >= stay) {
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), x);
        chosen = candidates[std::min<std::size_t>(it - cumulative.begin(), candidates.size() - 1)];
      }
    }
    if (chosen != refined[v]) {
      const auto old = refined[v];
      refined[v] = chosen;
      refined_weight[chosen] += a;
      refined_weight[old] = 0.0;
      ++refined_count[chosen];
      refined_count[old] = 0;
      external[chosen] += node_external[v] - 2.0 * link[chosen];
    }
    for (auto r : touched) {
      link[r] = 0.0;
      linked[r] = 0;
    }
  }
  return refined;
}

/// Collapses each group of `groups` (labels 0..k-1) into one node.
LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& groups, std::uint32_t k) {
  const auto n = g.size();
  std::vector<std::size_t> start(k + 1, 0);
  for (auto l : groups) ++start[l + 1];
  for (std::uint32_t l = 0; l < k; ++l) start[l + 1] += start[l];
  std::vector<std::uint32_t> members(n);
  {
    auto cursor = start;
    for (std::uint32_t v = 0; v < n; ++v) members[cursor[groups[v]]++] = v;
  }

  LevelGraph out;
  out.offsets.assign(k + 1, 0);
  out.self_loop.assign(k, 0.0);
  out.node_weight.assign(k, 0.0);
  std::vector<double> link(k, 0.0);
  std::vector<char> linked(k, 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t a = 0; a < k; ++a) {
    touched.clear();
    double internal = 0.0;
    for (auto idx = start[a]; idx < start[a + 1]; ++idx) {
      const auto u = members[idx];
      out.node_weight[a] += g.node_weight[u];
      out.self_loop[a] += g.self_loop[u];
      for (auto i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
        const auto b = groups[g.targets[i]];
        if (b == a) {
          internal += g.weights[i];
          continue;
        }
        if (!linked[b]) {
          linked[b] = 1;
          touched.push_back(b);
        }
        link[b] += g.weights[i];
      }
    }
    out.self_loop[a] += internal / 2.0;
    for (auto b : touched) {
      out.targets.push_back(b);
      out.weights.push_back(link[b]);
      link[b] = 0.0;
      linked[b] = 0;
    }
    out.offsets[a + 1] = out.targets.size();
  }
  return out;
}

/// Splits communities that are not connected in the base graph; labels are
/// compacted afterwards.
void split_disconnected(const SimpleGraph& g, std::vector<std::uint32_t>& membership) {
  const auto n = g.vertex_count();
  std::vector<std::uint32_t> label(n, UINT32_MAX);
  std::vector<std::uint32_t> stack;
  std::uint32_t next = 0;
  for (VertexId s = 0; s < n; ++s) {
    if (label[s] != UINT32_MAX) continue;
    label[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : g.neighbors(v)) {
        if (label[u] == UINT32_MAX && membership[u] == membership[s]) {
          label[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  membership = std::move(label);
}

/// Ids by descending size, ties by smallest member.
std::vector<std::size_t> canonicalise(std::vector<std::uint32_t>& membership) {
  const auto k = compact(membership);  // first-occurrence order = smallest member order
  std::vector<std::size_t> size(k, 0);
  for (auto c : membership) ++size[c];
  std::vector<std::uint32_t> order(k);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return size[x] > size[y]; });
  std::vector<std::uint32_t> rank(k);
  std::vector<std::size_t> sizes(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    rank[order[i]] = i;
    sizes[i] = size[order[i]];
  }
  for (auto& c : membership) c = rank[c];
  return sizes;
}

}  // namespace

double partition_quality(const SimpleGraph& graph, std::span<const std::uint32_t> membership, Objective objective,
                         double resolution, bool weighted) {
  const auto n = graph.vertex_count();
  if (membership.size() != n) throw ArgumentError("membership size does not match graph");
  const std::uint32_t k = n == 0 ? 0 : *std::max_element(membership.begin(), membership.end()) + 1;
  std::vector<double> internal(k, 0.0), total(k, 0.0);
  double m = 0.0;
  for (VertexId v = 0; v < n; ++v) {
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const double ew = weighted ? static_cast<double>(w[i]) : 1.0;
      total[membership[v]] += objective == Objective::modularity ? ew : 0.0;
      if (v < nb[i]) {
        m += ew;
        if (membership[v] == membership[nb[i]]) internal[membership[v]] += ew;
      }
    }
    if (objective == Objective::cpm) total[membership[v]] += 1.0;
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < k; ++c) {
    if (objective == Objective::modularity) {
      if (m > 0.0) q += internal[c] / m - resolution * (total[c] / (2.0 * m)) * (total[c] / (2.0 * m));
    } else {
      q += internal[c] - resolution * total[c] * (total[c] - 1.0) / 2.0;
    }
  }
  return q;
}

CommunityPartition leiden_partition(const SimpleGraph& graph, const LeidenOptions& options) {
  if (!(options.resolution > 0.0)) throw ArgumentError("resolution must be positive");
  if (!(options.randomness > 0.0)) throw ArgumentError("refinement randomness must be positive");
  const auto n = graph.vertex_count();
  CommunityPartition result;
  result.objective = options.objective;
  result.resolution = options.resolution;
  result.seed = options.seed;
  result.vertices.resize(n);
  std::iota(result.vertices.begin(), result.vertices.end(), VertexId{0});
  for (VertexId v = 0; v < n; ++v)
    if (graph.degree(v) == 0) ++result.isolated;

  std::vector<std::uint32_t> membership(n);
  if (!options.initial.empty()) {
    if (options.initial.size() != n) throw ArgumentError("initial membership size does not match graph");
    membership = options.initial;
    compact(membership);
  } else {
    std::iota(membership.begin(), membership.end(), 0u);
  }

  if (graph.edge_count() == 0) {
    std::iota(membership.begin(), membership.end(), 0u);
    result.degenerate = true;
    result.sizes = canonicalise(membership);
    result.membership = std::move(membership);
    result.quality = partition_quality(graph, result.membership, options.objective, options.resolution, options.weighted);
    result.quality_trace.push_back(result.quality);
    return result;
  }

  Rng rng(options.seed);
  const LevelGraph base = base_graph(graph, options.objective, options.weighted);
  double two_m = 0.0;
  for (double w : base.weights) two_m += w;
  const Scale scale{options.resolution, options.objective == Objective::modularity ? 1.0 / two_m : 1.0};

  split_disconnected(graph, membership);  // also compacts
  const int max_iterations = std::max(1, options.max_iterations);
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    const auto before = membership;
    LevelGraph level = base;
    std::vector<std::uint32_t> level_membership = membership;
    std::vector<std::uint32_t> node_of(n);
    std::iota(node_of.begin(), node_of.end(), 0u);

    while (true) {
      move_nodes(level, level_membership, scale, rng);
      auto communities = level_membership;
      const auto k = compact(communities);
      if (k == level.size()) {
        level_membership = std::move(communities);
        break;
      }
      auto refined = refine(level, level_membership, scale, options.randomness, rng);
      const auto r = compact(refined);
      if (r == level.size()) {
        // refinement merged nothing; aggregate the moved partition instead
        refined = communities;
      }
      const auto groups = r == level.size() ? k : r;
      // next-level nodes start in the community of their members
      std::vector<std::uint32_t> next_membership(groups);
      for (std::size_t v = 0; v < level.size(); ++v) next_membership[refined[v]] = level_membership[v];
      level = aggregate(level, refined, groups);
      for (auto& x : node_of) x = refined[x];
      compact(next_membership);
      level_membership = std::move(next_membership);
    }
    for (std::size_t v = 0; v < n; ++v) membership[v] = level_membership[node_of[v]];
    split_disconnected(graph, membership);
    const double q = partition_quality(graph, membership, options.objective, options.resolution, options.weighted);
    if (!result.quality_trace.empty() && q < result.quality_trace.back()) {
      // never hand back a worse partition than the previous iteration's
      membership = before;
      break;
    }
    const bool improved = result.quality_trace.empty() || q > result.quality_trace.back() + 1e-12;
    result.quality_trace.push_back(q);
    if (!improved) break;

    auto a = membership;
    auto b = before;
    compact(a);
    compact(b);
    if (a == b) break;
  }

  result.sizes = canonicalise(membership);
  result.membership = std::move(membership);
  result.quality = partition_quality(graph, result.membership, options.objective, options.resolution, options.weighted);
  return result;
}

CommunityPartition partition_view(const SliceView& view, std::size_t slice_index, SliceMode mode,
                                  const LeidenOptions& options) {
  auto p = leiden_partition(view.graph, options);
  p.slice_index = slice_index;
  p.mode = mode;
  p.vertices = view.active;
  return p;
}

}  // namespace wildfire
