#include "wildfire/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wildfire {

std::string_view to_string(DegreeMode mode) {
  return mode == DegreeMode::contacts ? "contacts" : "unique_neighbors";
}

std::uint64_t degree_centrality(const SliceView& view, VertexId vertex, DegreeMode mode) {
  const auto local = view.local_index(vertex);
  if (!local) return 0;
  return mode == DegreeMode::contacts ? view.contacts[*local] : view.graph.degree(*local);
}

std::pair<TimeSeries, TimeSeries> contact_user_series(std::span<const Slice> slices) {
  TimeSeries contacts{"contacts", {}, {}, std::nullopt};
  TimeSeries users{"users", {}, {}, std::nullopt};
  if (slices.empty()) return {contacts, users};

  UserId max_id = 0;
  for (const auto& s : slices)
    for (const auto& e : s.events) max_id = std::max({max_id, e.source, e.target});
  std::vector<std::size_t> stamp(max_id + 1, 0);

  // nested prefixes of one event array (accumulative slices): count incrementally
  const ContactEvent* base = slices.front().events.data();
  bool nested = true;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    nested = nested && slices[i].events.data() == base &&
             (i == 0 || slices[i].events.size() >= slices[i - 1].events.size());
  }
  std::size_t distinct = 0;
  std::size_t seen_events = 0;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& s = slices[i];
    std::span<const ContactEvent> fresh = s.events;
    std::size_t tag = 1;
    if (nested) {
      fresh = s.events.subspan(seen_events);
      seen_events = s.events.size();
    } else {
      tag = i + 1;
      distinct = 0;
    }
    for (const auto& e : fresh) {
      for (const UserId x : {e.source, e.target}) {
        if (stamp[x] != tag) {
          stamp[x] = tag;
          ++distinct;
        }
      }
    }
    contacts.push(s.index, static_cast<double>(s.events.size()));
    users.push(s.index, static_cast<double>(distinct));
  }
  return {contacts, users};
}

namespace {

std::vector<double> knn_values(const SimpleGraph& g) {
  std::vector<double> knn(g.vertex_count(), 0.0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto nb = g.neighbors(v);
    if (nb.empty()) continue;
    std::uint64_t sum = 0;
    for (auto u : nb) sum += g.degree(u);
    knn[v] = static_cast<double>(sum) / static_cast<double>(nb.size());
  }
  return knn;
}

}  // namespace

AnndCurve annd_curve(const SimpleGraph& graph) {
  if (graph.edge_count() == 0) throw ArgumentError("no degree classes");
  const auto knn = knn_values(graph);
  std::map<std::size_t, std::pair<double, std::size_t>> classes;
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    const auto k = graph.degree(v);
    if (k == 0) continue;
    auto& [sum, n] = classes[k];
    sum += knn[v];
    ++n;
  }
  AnndCurve curve;
  for (const auto& [k, acc] : classes) {
    curve.degree.push_back(k);
    curve.mean_knn.push_back(acc.first / static_cast<double>(acc.second));
    curve.count.push_back(acc.second);
  }
  return curve;
}

std::vector<AnndPoint> annd_scatter(const SimpleGraph& graph) {
  const auto knn = knn_values(graph);
  std::vector<AnndPoint> points;
  for (VertexId v = 0; v < graph.vertex_count(); ++v)
    if (graph.degree(v) > 0) points.push_back({v, graph.degree(v), knn[v]});
  return points;
}

std::vector<std::pair<double, double>> top_active_fraction(const SliceView& view, std::span<const double> fractions) {
  if (view.n_events == 0) throw ArgumentError("no contacts");
  for (double p : fractions)
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("top-active fraction must be in (0, 1], got " + std::to_string(p));

  std::vector<std::uint64_t> sorted = view.contacts;
  // active is ascending by global id, so a stable sort gives the id tie-break
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<std::uint64_t> prefix(sorted.size() + 1, 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];

  const double denom = 2.0 * static_cast<double>(view.n_events);
  const auto n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(fractions.size());
  for (double p : fractions) {
    // guard against p·n landing a hair above an integer
    auto top = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    top = std::clamp<std::size_t>(top, 1, sorted.size());
    out.emplace_back(p, static_cast<double>(prefix[top]) / denom);
  }
  return out;
}

DegreeHistogram degree_distribution(const SliceView& view, DegreeMode mode) {
  DegreeHistogram hist;
  for (VertexId v = 0; v < view.active.size(); ++v) {
    const auto k = mode == DegreeMode::contacts ? view.contacts[v] : view.graph.degree(v);
    ++hist[k];
  }
  return hist;
}

DegreeHistogram degree_distribution(const SimpleGraph& graph) {
  DegreeHistogram hist;
  for (VertexId v = 0; v < graph.vertex_count(); ++v) ++hist[graph.degree(v)];
  return hist;
}

std::vector<LogBin> log_binned(const DegreeHistogram& hist, int bins_per_decade) {
  if (bins_per_decade <= 0) throw ArgumentError("bins_per_decade must be positive");
  std::uint64_t total = 0;
  for (const auto& [k, c] : hist)
    if (k > 0) total += c;
  std::vector<LogBin> bins;
  if (total == 0) return bins;
  const double step = std::pow(10.0, 1.0 / bins_per_decade);
  auto it = hist.lower_bound(1);
  for (int b = 0; it != hist.end(); ++b) {
    const double lo = std::pow(step, b);
    const double hi = std::pow(step, b + 1);
    // integers k with lo <= k < hi
    const double first = std::ceil(lo - 1e-9);
    const double last = std::ceil(hi - 1e-9) - 1.0;
    std::uint64_t count = 0;
    while (it != hist.end() && static_cast<double>(it->first) < hi - 1e-9) {
      count += it->second;
      ++it;
    }
    const double width = last - first + 1.0;
    if (count > 0 && width > 0)
      bins.push_back({lo, hi, count, static_cast<double>(count) / width / static_cast<double>(total)});
  }
  return bins;
}

}  // namespace wildfire
