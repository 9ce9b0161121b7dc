#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "wildfire/slicing.hpp"

using namespace wildfire;

namespace {

TemporalGraph random_graph(std::size_t n_events, std::size_t n_vertices, Timestamp t0, Timestamp horizon,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<UserId> user(0, n_vertices - 1);
  std::uniform_int_distribution<Timestamp> t(t0, horizon - 1);
  ContactLog log;
  for (std::size_t i = 0; i < n_vertices; ++i) log.users.intern("v" + std::to_string(i));
  while (log.events.size() < n_events) {
    ContactEvent e{user(rng), user(rng), t(rng)};
    if (e.source != e.target) log.events.push_back(e);
  }
  return build_underlying_graph(log, t0, horizon);
}

std::multiset<std::tuple<UserId, UserId, Timestamp>> as_set(std::span<const ContactEvent> ev) {
  std::multiset<std::tuple<UserId, UserId, Timestamp>> s;
  for (const auto& e : ev) s.insert({e.source, e.target, e.timestamp});
  return s;
}

}  // namespace

TEST_CASE("slice counts") {
  SliceSpec s{SliceMode::temporal, 100, 0, 60000};
  CHECK(s.slice_count() == 600);
  s.delta_t = 600;
  CHECK(s.slice_count() == 100);
  s.delta_t = 7;
  CHECK(s.slice_count() == 8572);  // ceil(60000 / 7)
  SliceSpec feb_may{SliceMode::temporal, 4 * 3600, 1580515200, 1589155200};
  CHECK(feb_may.slice_count() == 600);
  feb_may.delta_t = 86400;
  CHECK(feb_may.slice_count() == 100);
  CHECK_THROWS_AS((SliceSpec{SliceMode::temporal, 0, 0, 10}.validate()), ArgumentError);
  CHECK_THROWS_AS((SliceSpec{SliceMode::temporal, 5, 10, 10}.validate()), ArgumentError);
}

TEST_CASE("temporal slices partition the events") {
  const auto g = random_graph(5000, 60, 0, 60000, 1);
  for (Duration dt : {100, 600, 7, 60000, 100000}) {
    const auto slices = temporal_slices(g, dt);
    REQUIRE(slices.size() == static_cast<std::size_t>((60000 + dt - 1) / dt));
    std::multiset<std::tuple<UserId, UserId, Timestamp>> all;
    std::size_t total = 0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const auto& s = slices[i];
      CHECK(s.index == i + 1);
      CHECK(s.interval.start == static_cast<Timestamp>(i) * dt);
      for (const auto& e : s.events) REQUIRE(s.interval.contains(e.timestamp));
      total += s.events.size();
      const auto part = as_set(s.events);
      all.insert(part.begin(), part.end());
      if (i + 1 < slices.size()) CHECK(s.interval.end == slices[i + 1].interval.start);
    }
    CHECK(total == g.event_count());
    CHECK(all == as_set(g.events));
    CHECK(slices.back().interval.end == 60000);
    CHECK(slices.back().partial == (60000 % dt != 0));
  }
  CHECK_THROWS_AS(temporal_slices(g, 0), ArgumentError);
  CHECK_THROWS_AS(temporal_slices(g, -5), ArgumentError);
}

TEST_CASE("accumulative slices are nested prefixes and unions of temporal slices") {
  const auto g = random_graph(3000, 40, 0, 10000, 2);
  for (Duration dt : {100, 333, 2500}) {
    const auto tem = temporal_slices(g, dt);
    const auto acc = accumulative_slices(g, dt);
    REQUIRE(acc.size() == tem.size());
    std::multiset<std::tuple<UserId, UserId, Timestamp>> running;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      const auto part = as_set(tem[i].events);
      running.insert(part.begin(), part.end());
      REQUIRE(as_set(acc[i].events) == running);
      CHECK(acc[i].interval.start == 0);
      CHECK(acc[i].interval.end == tem[i].interval.end);
      if (i > 0) CHECK(acc[i - 1].events.size() <= acc[i].events.size());
    }
    CHECK(acc.back().events.size() == g.event_count());
  }
}

TEST_CASE("an event on a slice boundary belongs to the later slice") {
  ContactLog log;
  log.users.intern("a");
  log.users.intern("b");
  log.events = {{0, 1, 99}, {0, 1, 100}, {1, 0, 199}, {1, 0, 200}};
  const auto g = build_underlying_graph(log, 0, 300);
  const auto s = temporal_slices(g, 100);
  REQUIRE(s.size() == 3);
  CHECK(s[0].events.size() == 1);
  CHECK(s[1].events.size() == 2);
  CHECK(s[2].events.size() == 1);
  CHECK(s[1].events.front().timestamp == 100);
  const auto a = accumulative_slices(g, 100);
  CHECK(a[0].events.size() == 1);
  CHECK(a[1].events.size() == 3);
}

TEST_CASE("empty graph still has slices") {
  TemporalGraph g;
  g.t0 = 0;
  g.horizon = 1000;
  const auto s = temporal_slices(g, 100);
  CHECK(s.size() == 10);
  for (const auto& x : s) {
    CHECK(x.events.empty());
    CHECK(slice_view(x).active_count() == 0);
  }
}

TEST_CASE("slice view merges pairs and keeps contact counts") {
  const auto g = random_graph(4000, 30, 0, 1000, 3);
  const auto view = slice_view(std::span<const ContactEvent>(g.events));

  // oracle: pair map and endpoint counts by hand
  std::map<std::pair<UserId, UserId>, std::uint32_t> pairs;
  std::map<UserId, std::uint64_t> contacts;
  for (const auto& e : g.events) {
    ++pairs[{std::min(e.source, e.target), std::max(e.source, e.target)}];
    ++contacts[e.source];
    ++contacts[e.target];
  }
  CHECK(view.n_events == g.event_count());
  CHECK(view.graph.edge_count() == pairs.size());
  REQUIRE(view.active_count() == contacts.size());
  CHECK(std::is_sorted(view.active.begin(), view.active.end()));
  for (const auto& ed : view.graph.edges()) {
    const auto key = std::pair<UserId, UserId>{view.active[ed.u], view.active[ed.v]};
    REQUIRE(pairs.count(key));
    CHECK(pairs[key] == ed.weight);
  }
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < view.active.size(); ++i) {
    CHECK(view.contacts[i] == contacts[view.active[i]]);
    sum += view.contacts[i];
    CHECK(view.local_index(view.active[i]) == static_cast<VertexId>(i));
  }
  CHECK(sum == 2 * g.event_count());
  CHECK_FALSE(view.local_index(1000));
}

TEST_CASE("accumulative builder agrees with a full rebuild") {
  const auto g = random_graph(6000, 200, 0, 5000, 4);
  const auto tem = temporal_slices(g, 250);
  const auto acc = accumulative_slices(g, 250);
  AccumulativeViewBuilder b(g.vertex_count());
  for (std::size_t i = 0; i < tem.size(); ++i) {
    b.add(tem[i].events);
    const auto fast = b.view();
    const auto full = slice_view(acc[i]);
    REQUIRE(fast.active == full.active);
    REQUIRE(fast.contacts == full.contacts);
    REQUIRE(fast.n_events == full.n_events);
    const auto fe = fast.graph.edges(), ue = full.graph.edges();
    REQUIRE(fe.size() == ue.size());
    for (std::size_t k = 0; k < fe.size(); ++k) {
      REQUIRE(fe[k].u == ue[k].u);
      REQUIRE(fe[k].v == ue[k].v);
      REQUIRE(fe[k].weight == ue[k].weight);
    }
    CHECK(b.edge_count() == full.graph.edge_count());
    CHECK(b.active_count() == full.active_count());
  }
}

TEST_CASE("simple graph construction") {
  const auto g = SimpleGraph::from_edges(4, {{0, 1, 1}, {1, 0, 2}, {2, 3, 1}});
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.weights(0)[0] == 3);
  const auto e = g.edges();
  REQUIRE(e.size() == 2);
  CHECK(e[0].u == 0);
  CHECK(e[0].v == 1);
  CHECK(SimpleGraph{}.vertex_count() == 0);
}
