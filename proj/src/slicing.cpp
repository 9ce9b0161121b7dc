#include "wildfire/slicing.hpp"

#include <algorithm>
#include <string>

namespace wildfire {

std::string_view to_string(SliceMode mode) {
  return mode == SliceMode::temporal ? "temporal" : "accumulative";
}

SliceMode parse_slice_mode(std::string_view name) {
  if (name == "temporal") return SliceMode::temporal;
  if (name == "accumulative" || name == "cumulative") return SliceMode::accumulative;
  throw ArgumentError("unknown slice mode '" + std::string(name) + "' (expected temporal or accumulative)");
}

void SliceSpec::validate() const {
  if (delta_t <= 0) throw ArgumentError("slice width must be positive, got " + std::to_string(delta_t) + "s");
  if (horizon <= t0) throw ArgumentError("slice horizon must be after t0");
}

std::size_t SliceSpec::slice_count() const {
  validate();
  const auto span = horizon - t0;
  return static_cast<std::size_t>((span + delta_t - 1) / delta_t);
}

TimeInterval SliceSpec::step_interval(std::size_t index) const {
  const Timestamp start = t0 + static_cast<Timestamp>(index - 1) * delta_t;
  return {start, std::min(start + delta_t, horizon)};
}

TimeInterval SliceSpec::interval(std::size_t index) const {
  auto step = step_interval(index);
  if (mode == SliceMode::accumulative) step.start = t0;
  return step;
}

SliceSpec spec_for(const TemporalGraph& g, SliceMode mode, Duration delta_t) {
  SliceSpec spec{mode, delta_t, g.t0, g.horizon};
  spec.validate();
  return spec;
}

std::vector<Slice> make_slices(const TemporalGraph& g, const SliceSpec& spec) {
  spec.validate();
  const auto count = spec.slice_count();
  std::vector<Slice> slices;
  slices.reserve(count);
  const std::span<const ContactEvent> all(g.events);
  std::size_t cursor = 0;
  for (std::size_t i = 1; i <= count; ++i) {
    const auto step = spec.step_interval(i);
    const std::size_t begin = cursor;
    while (cursor < all.size() && all[cursor].timestamp < step.end) ++cursor;
    Slice s;
    s.index = i;
    s.mode = spec.mode;
    s.interval = spec.interval(i);
    s.partial = step.length() < spec.delta_t;
    s.first_event = spec.mode == SliceMode::temporal ? begin : 0;
    s.events = all.subspan(s.first_event, cursor - s.first_event);
    slices.push_back(s);
  }
  return slices;
}

std::vector<Slice> temporal_slices(const TemporalGraph& g, Duration delta_t) {
  return make_slices(g, spec_for(g, SliceMode::temporal, delta_t));
}

std::vector<Slice> accumulative_slices(const TemporalGraph& g, Duration delta_t) {
  return make_slices(g, spec_for(g, SliceMode::accumulative, delta_t));
}

std::optional<VertexId> SliceView::local_index(VertexId global) const {
  auto it = std::lower_bound(active.begin(), active.end(), global);
  if (it == active.end() || *it != global) return std::nullopt;
  return static_cast<VertexId>(it - active.begin());
}

namespace {

std::uint64_t pair_key(UserId a, UserId b) {
  const auto lo = std::min(a, b);
  const auto hi = std::max(a, b);
  return (lo << 32) | hi;
}

}  // namespace

SliceView slice_view(std::span<const ContactEvent> events) {
  SliceView view;
  view.n_events = events.size();
  view.active.reserve(2 * events.size());
  for (const auto& e : events) {
    view.active.push_back(static_cast<VertexId>(e.source));
    view.active.push_back(static_cast<VertexId>(e.target));
  }
  std::sort(view.active.begin(), view.active.end());
  view.active.erase(std::unique(view.active.begin(), view.active.end()), view.active.end());

  auto local = [&](UserId g) {
    return static_cast<VertexId>(std::lower_bound(view.active.begin(), view.active.end(), g) - view.active.begin());
  };
  view.contacts.assign(view.active.size(), 0);
  std::vector<SimpleGraph::Edge> edges;
  edges.reserve(events.size());
  for (const auto& e : events) {
    const auto u = local(e.source);
    const auto v = local(e.target);
    ++view.contacts[u];
    ++view.contacts[v];
    edges.push_back({u, v, 1});
  }
  view.graph = SimpleGraph::from_edges(view.active.size(), std::move(edges));
  return view;
}

AccumulativeViewBuilder::AccumulativeViewBuilder(std::size_t vertex_count) : contacts_(vertex_count, 0) {}

void AccumulativeViewBuilder::add(std::span<const ContactEvent> delta) {
  if (delta.empty()) return;
  n_events_ += delta.size();

  std::vector<std::uint64_t> keys;
  keys.reserve(delta.size());
  std::vector<VertexId> fresh;
  for (const auto& e : delta) {
    keys.push_back(pair_key(e.source, e.target));
    for (const UserId x : {e.source, e.target}) {
      if (contacts_.at(x)++ == 0) fresh.push_back(static_cast<VertexId>(x));
    }
  }
  std::sort(keys.begin(), keys.end());

  std::vector<std::uint64_t> merged_keys;
  std::vector<std::uint32_t> merged_counts;
  merged_keys.reserve(pair_keys_.size() + keys.size());
  merged_counts.reserve(pair_keys_.size() + keys.size());
  std::size_t i = 0, j = 0;
  while (i < pair_keys_.size() || j < keys.size()) {
    if (j == keys.size() || (i < pair_keys_.size() && pair_keys_[i] < keys[j])) {
      merged_keys.push_back(pair_keys_[i]);
      merged_counts.push_back(pair_counts_[i]);
      ++i;
      continue;
    }
    const auto k = keys[j];
    std::uint32_t c = 0;
    while (j < keys.size() && keys[j] == k) {
      ++c;
      ++j;
    }
    if (i < pair_keys_.size() && pair_keys_[i] == k) {
      c += pair_counts_[i];
      ++i;
    }
    merged_keys.push_back(k);
    merged_counts.push_back(c);
  }
  pair_keys_ = std::move(merged_keys);
  pair_counts_ = std::move(merged_counts);

  std::sort(fresh.begin(), fresh.end());
  std::vector<VertexId> merged_active;
  merged_active.reserve(active_.size() + fresh.size());
  std::merge(active_.begin(), active_.end(), fresh.begin(), fresh.end(), std::back_inserter(merged_active));
  active_ = std::move(merged_active);
}

SliceView AccumulativeViewBuilder::view() const {
  SliceView view;
  view.n_events = n_events_;
  view.active = active_;
  view.contacts.reserve(active_.size());
  std::vector<VertexId> local_of(contacts_.size(), 0);
  for (std::size_t i = 0; i < active_.size(); ++i) {
    local_of[active_[i]] = static_cast<VertexId>(i);
    view.contacts.push_back(contacts_[active_[i]]);
  }
  std::vector<SimpleGraph::Edge> edges;
  edges.reserve(pair_keys_.size());
  for (std::size_t i = 0; i < pair_keys_.size(); ++i) {
    const auto lo = static_cast<VertexId>(pair_keys_[i] >> 32);
    const auto hi = static_cast<VertexId>(pair_keys_[i] & 0xffffffffu);
    edges.push_back({local_of[lo], local_of[hi], pair_counts_[i]});
  }
  view.graph = SimpleGraph::from_sorted_unique(active_.size(), edges);
  return view;
}

}  // namespace wildfire
