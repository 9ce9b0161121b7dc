#include <doctest.h>

#include <zlib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "wildfire/event_file.hpp"
#include "wildfire/ingest.hpp"
#include "wildfire/synth.hpp"

using namespace wildfire;

namespace {

std::string gzip(const std::string& raw) {
  z_stream zs{};
  REQUIRE(deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) == Z_OK);
  std::string out(deflateBound(&zs, raw.size()) + 32, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

struct NamedEvent {
  std::string s, t;
  Timestamp ts;
  ContactKind kind;
  std::string status;
  auto operator<=>(const NamedEvent&) const = default;
};

std::vector<NamedEvent> named(const ContactLog& log) {
  std::vector<NamedEvent> out;
  for (const auto& e : log.events)
    out.push_back({log.users.name(e.source), log.users.name(e.target), e.timestamp, e.kind,
                   e.status == kNoStatus ? "" : log.statuses.name(e.status)});
  return out;
}

std::vector<ContactEvent> random_events(std::size_t n, std::uint64_t seed, Timestamp lo = 0, Timestamp hi = 1000) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<UserId> user(0, 50);
  std::uniform_int_distribution<Timestamp> t(lo, hi - 1);
  std::vector<ContactEvent> ev;
  while (ev.size() < n) {
    ContactEvent e{user(rng), user(rng), t(rng), static_cast<ContactKind>(rng() % 4), rng() % 3 ? kNoStatus : rng() % 9};
    if (e.source != e.target) ev.push_back(e);
  }
  return ev;
}

}  // namespace

TEST_CASE("three-line csv drops the self contact") {
  const auto r = parse_contacts("a,b,100,retweet\nb,c,200,reply\na,a,300,quote\n", InputFormat::csv);
  CHECK(r.log.events.size() == 2);
  CHECK(r.stats.self_loops == 1);
  CHECK(r.stats.records_parsed == 2);
  CHECK(r.stats.malformed == 0);
  CHECK(r.log.events[1].kind == ContactKind::reply);
  CHECK(r.log.users.size() == 3);
}

TEST_CASE("empty input") {
  for (auto fmt : {InputFormat::csv, InputFormat::jsonl, InputFormat::osf}) {
    const auto r = parse_contacts("", fmt);
    CHECK(r.log.events.empty());
    CHECK(r.stats.records_parsed == 0);
    CHECK(r.stats.malformed == 0);
    CHECK(r.stats.self_loops == 0);
  }
}

TEST_CASE("1% corrupted lines are counted, not fatal") {
  std::mt19937_64 rng(3);
  std::set<std::size_t> bad;
  while (bad.size() < 100) bad.insert(rng() % 10000);
  const char* corruptions[] = {"garbage", "u1,u2,notatime,retweet", ",u2,5,reply", "u1,u2,5,teleport", "u1",
                               "u1,u2,5,retweet,s1,extra"};
  std::string text;
  for (std::size_t i = 0; i < 10000; ++i) {
    if (bad.count(i))
      text += corruptions[i % std::size(corruptions)];
    else
      text += "u" + std::to_string(i % 97) + ",v" + std::to_string(i % 89) + "," + std::to_string(1000 + i) + ",retweet";
    text += '\n';
  }
  const auto r = parse_contacts(text, InputFormat::csv);
  CHECK(r.log.events.size() == 9900);
  CHECK(r.stats.malformed == 100);
}

TEST_CASE("csv header in any order, quoted fields, optional columns") {
  const auto r = parse_contacts(
      "timestamp,target,source,status_id\n"
      "100,\"b,c\",a,s1\n"
      "2020-02-01T00:00:00Z,a,\"say \"\"hi\"\"\",s2\n",
      InputFormat::csv);
  REQUIRE(r.log.events.size() == 2);
  CHECK(r.stats.header);
  CHECK(r.log.users.name(r.log.events[0].target) == "b,c");
  CHECK(r.log.users.name(r.log.events[1].source) == "say \"hi\"");
  CHECK(r.log.events[1].timestamp == 1580515200);
  CHECK(r.log.events[0].kind == ContactKind::unknown);
  CHECK(r.log.statuses.name(r.log.events[1].status) == "s2");
}

TEST_CASE("jsonl records") {
  const auto r = parse_contacts(
      "{\"source\":\"a\",\"target\":\"b\",\"timestamp\":100,\"kind\":\"quote\"}\n"
      "{\"source\":17,\"target\":\"b\",\"timestamp\":\"2020-02-01\",\"status_id\":99}\n"
      "{\"source\":\"a\",\"timestamp\":5}\n"
      "not json\n"
      "\n",
      InputFormat::jsonl);
  REQUIRE(r.log.events.size() == 2);
  CHECK(r.stats.malformed == 2);
  CHECK(r.stats.blank_lines == 1);
  CHECK(r.log.users.name(r.log.events[1].source) == "17");
  CHECK(r.log.statuses.name(r.log.events[1].status) == "99");
  CHECK(r.log.events[0].kind == ContactKind::quote);
}

TEST_CASE("gzip input is detected by magic bytes") {
  const std::string raw = "a,b,100,retweet\nb,c,200,reply\n";
  std::istringstream plain(raw), packed(gzip(raw));
  const auto a = parse_contacts(plain, InputFormat::csv);
  const auto b = parse_contacts(packed, InputFormat::csv);
  CHECK(named(a.log) == named(b.log));
  CHECK(b.log.events.size() == 2);
  std::istringstream broken(gzip(raw).substr(0, 12));
  CHECK_THROWS_AS(parse_contacts(broken, InputFormat::csv), IoError);
}

TEST_CASE("osf adapter count matches an independent recount") {
  std::mt19937_64 rng(11);
  std::string text = "# exported network\nSource\tTarget\tTimestamp\tType\n";
  std::size_t expected = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto s = rng() % 40, t = rng() % 40;
    const auto roll = rng() % 20;
    if (roll == 0) {
      text += "# comment\n";
      continue;
    }
    if (roll == 1) {
      text += "broken line\n";
      continue;
    }
    text += std::to_string(s) + "\t" + std::to_string(t) + "\t" + std::to_string(1580515200 + i) + "\tretweet\n";
    if (s != t) ++expected;
  }
  const auto r = parse_contacts(text, InputFormat::osf);

  // oracle: tab-split every data line by hand
  std::size_t recount = 0;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) f.push_back(cell);
    if (f.size() == 4 && f[0] != f[1]) ++recount;
  }
  CHECK(recount == expected);
  CHECK(r.log.events.size() == recount);

  const auto ws = parse_contacts("from to time\n1 2 100\n2 3 200\n", InputFormat::osf);
  CHECK(ws.log.events.size() == 2);
  const auto headerless = parse_contacts("1,2,100\n2,3,200,reply\n", InputFormat::osf);
  CHECK(headerless.log.events.size() == 2);
}

TEST_CASE("deduplicate") {
  ContactEvent e{1, 2, 10, ContactKind::retweet, kNoStatus};
  CHECK(deduplicate(std::vector{e, e, e}).size() == 1);

  const auto unique = [] {
    std::vector<ContactEvent> v;
    for (UserId i = 0; i < 1000; ++i) v.push_back({i, i + 1, static_cast<Timestamp>(i), ContactKind::reply, kNoStatus});
    return v;
  }();
  CHECK(deduplicate(unique) == unique);

  // 137 planted copies of random earlier events
  std::mt19937_64 rng(5);
  std::vector<ContactEvent> planted(unique.begin(), unique.begin() + 863);
  for (int i = 0; i < 137; ++i) planted.push_back(planted[rng() % 863]);
  std::shuffle(planted.begin() + 863, planted.end(), rng);
  const auto d = deduplicate(planted);
  CHECK(d.size() == 863);
  CHECK(std::equal(d.begin(), d.end(), unique.begin()));  // first occurrences, in order
  CHECK(deduplicate(d) == d);

  // a retweet of the same status at another time is a distinct contact
  ContactEvent later = e;
  later.timestamp = 11;
  CHECK(deduplicate(std::vector{e, later}).size() == 2);
}

TEST_CASE("filter_window") {
  std::vector<ContactEvent> ev{{1, 2, 50}, {1, 2, 150}, {1, 2, 250}};
  const auto f = filter_window(ev, 100, 200);
  REQUIRE(f.size() == 1);
  CHECK(f[0].timestamp == 150);
  CHECK(filter_window(ev, 0, 1000) == ev);
  CHECK_THROWS_AS(filter_window(ev, 200, 200), ArgumentError);
  CHECK_THROWS_AS(filter_window(ev, 300, 200), ArgumentError);

  const auto r = random_events(5000, 9);
  std::size_t brute = 0;
  for (const auto& x : r) brute += x.timestamp >= 250 && x.timestamp < 750;
  CHECK(filter_window(r, 250, 750).size() == brute);

  // [a, c) splits into [a, b) and [b, c)
  for (Timestamp b : {251, 400, 749}) {
    const auto left = filter_window(r, 250, b);
    const auto right = filter_window(r, b, 750);
    CHECK(left.size() + right.size() == brute);
  }
}

TEST_CASE("underlying graph") {
  const auto r = parse_contacts("a,b,1\nb,c,2\n", InputFormat::csv);
  const auto g = build_underlying_graph(r.log, 0, 10);
  CHECK(g.vertex_count() == 3);
  CHECK(g.event_count() == 2);

  const auto empty = build_underlying_graph(ContactLog{}, 0, 10);
  CHECK(empty.vertex_count() == 0);
  CHECK(empty.event_count() == 0);

  CHECK_THROWS_AS(build_underlying_graph(r.log, 5, 10), ArgumentError);
  CHECK_THROWS_AS(build_underlying_graph(r.log, 0, 2), ArgumentError);  // t = 2 is outside [0, 2)
  CHECK_THROWS_AS(build_underlying_graph(r.log, 10, 10), ArgumentError);

  // unsorted input comes out sorted; ids compact to vertices that occur
  ContactLog log;
  for (auto n : {"x", "unused", "y", "z"}) log.users.intern(n);
  log.events = {{3, 2, 9}, {0, 2, 4}, {0, 3, 4}};
  const auto h = build_underlying_graph(log, 0, 10);
  CHECK(h.vertex_count() == 3);
  CHECK(std::is_sorted(h.events.begin(), h.events.end(),
                       [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; }));
  CHECK(h.vertex_names[h.events[0].source] == "x");
  CHECK(h.vertex_names[h.events[0].target] == "y");
  CHECK(h.vertex_names[h.events[2].source] == "z");
  CHECK(h.vertex_count() <= 2 * h.event_count());
}

TEST_CASE("synthetic stream counts match the generator ledger") {
  SynthConfig cfg;
  cfg.n_users = 5000;
  cfg.base_rate = 170;
  cfg.seed = 21;
  const auto out = generate(cfg);
  const auto g = build_underlying_graph(out.log, cfg.start, cfg.start + cfg.duration);
  std::size_t touched = 0;
  for (auto c : out.ledger.user_contacts) touched += c > 0;
  CHECK(out.ledger.n_events > 90000);
  CHECK(g.event_count() == out.ledger.n_events);
  CHECK(g.vertex_count() == touched);
}

TEST_CASE("csv and jsonl serialisation round trip") {
  const auto r = parse_contacts(
      "source,target,timestamp,kind,status_id\n"
      "a,b,100,retweet,s1\n\" padded \",\"x,y\",200,reply,\n\"q\"\"uote\",a,300,unknown,s3\n",
      InputFormat::csv);
  REQUIRE(r.log.events.size() == 3);
  for (auto fmt : {InputFormat::csv, InputFormat::jsonl}) {
    std::ostringstream out;
    if (fmt == InputFormat::csv)
      write_events_csv(out, r.log.events, r.log.users.names(), r.log.statuses.names());
    else
      write_events_jsonl(out, r.log.events, r.log.users.names(), r.log.statuses.names());
    const auto back = parse_contacts(out.str(), fmt);
    CHECK(back.stats.malformed == 0);
    CHECK(named(back.log) == named(r.log));
  }
}

TEST_CASE("canonical event file round trip") {
  SynthConfig cfg;
  cfg.n_users = 300;
  cfg.base_rate = 5;
  cfg.duration = 10 * 86400;
  cfg.ramp.reset();
  const auto out = generate(cfg);
  const auto g = build_underlying_graph(out.log, cfg.start, cfg.start + cfg.duration);
  std::stringstream buf;
  write_event_file(buf, g, {123, 456});
  const auto bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "WFEV");
  EventFileHeader h;
  std::istringstream in(bytes);
  const auto back = read_event_file(in, &h);
  CHECK(h.source_size == 123);
  CHECK(h.source_mtime == 456);
  CHECK(back.events == g.events);
  CHECK(back.vertex_names == g.vertex_names);
  CHECK(back.status_names == g.status_names);
  CHECK(back.t0 == g.t0);
  CHECK(back.horizon == g.horizon);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 7));
  CHECK_THROWS_AS(read_event_file(truncated), IoError);
  std::istringstream foreign("source,target\n");
  CHECK_THROWS_AS(read_event_file(foreign), IoError);

  const auto path = std::filesystem::temp_directory_path() / "wildfire_roundtrip.wfev";
  write_event_file(path, g);
  CHECK(is_event_file(path));
  CHECK(read_event_file(path).events == g.events);
  std::filesystem::remove(path);
  CHECK_FALSE(is_event_file(path));
  CHECK_THROWS_AS(read_event_file(path), IoError);
}
