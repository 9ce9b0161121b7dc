#include "wildfire/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "wildfire/time_util.hpp"

namespace wildfire {

std::string_view to_string(ContactKind kind) {
  switch (kind) {
    case ContactKind::retweet: return "retweet";
    case ContactKind::reply: return "reply";
    case ContactKind::quote: return "quote";
    case ContactKind::unknown: return "unknown";
  }
  return "unknown";
}

bool parse_kind(std::string_view text, ContactKind& out) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "retweet" || lower == "rt") {
    out = ContactKind::retweet;
  } else if (lower == "reply" || lower == "comment") {
    out = ContactKind::reply;
  } else if (lower == "quote") {
    out = ContactKind::quote;
  } else if (lower == "unknown" || lower.empty()) {
    out = ContactKind::unknown;
  } else {
    return false;
  }
  return true;
}

std::string_view to_string(InputFormat f) {
  switch (f) {
    case InputFormat::csv: return "csv";
    case InputFormat::jsonl: return "jsonl";
    case InputFormat::osf: return "osf";
  }
  return "csv";
}

InputFormat parse_input_format(std::string_view name) {
  if (name == "csv") return InputFormat::csv;
  if (name == "jsonl" || name == "ndjson") return InputFormat::jsonl;
  if (name == "osf") return InputFormat::osf;
  throw ArgumentError("unknown input format '" + std::string(name) + "' (expected csv, jsonl or osf)");
}

InputFormat guess_input_format(const std::filesystem::path& path) {
  auto p = path;
  if (p.extension() == ".gz") p.replace_extension();
  const auto ext = p.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return InputFormat::jsonl;
  if (ext == ".tsv" || ext == ".txt" || ext == ".edges") return InputFormat::osf;
  return InputFormat::csv;
}

std::uint64_t IdTable::intern(std::string_view name) {
  auto [it, inserted] = index_.try_emplace(std::string(name), names_.size());
  if (inserted) names_.emplace_back(name);
  return it->second;
}

std::string maybe_gunzip(std::string bytes) {
  if (bytes.size() < 2 || static_cast<unsigned char>(bytes[0]) != 0x1f || static_cast<unsigned char>(bytes[1]) != 0x8b)
    return bytes;
  std::string out;
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib initialisation failed");
  zs.next_in = reinterpret_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::array<char, 1 << 16> buf{};
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf.data());
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IoError("corrupt gzip input");
    }
    out.append(buf.data(), buf.size() - zs.avail_out);
    // concatenated gzip members
    if (rc == Z_STREAM_END && zs.avail_in > 0) {
      if (inflateReset(&zs) != Z_OK) break;
      rc = Z_OK;
    }
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return std::tolower(c); });
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record. Quoted fields may contain the delimiter and "" escapes.
// Returns false on an unterminated quote.
bool split_delimited(std::string_view line, char delim, std::vector<std::string>& fields) {
  fields.clear();
  std::string cur;
  bool quoted = false;
  bool in_field_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_field_quote) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_field_quote = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty() && !quoted) {
      in_field_quote = true;
      quoted = true;
    } else if (c == delim) {
      fields.emplace_back(quoted ? cur : std::string(trim(cur)));
      cur.clear();
      quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (in_field_quote) return false;
  fields.emplace_back(quoted ? cur : std::string(trim(cur)));
  return true;
}

void split_whitespace(std::string_view line, std::vector<std::string>& fields) {
  fields.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.emplace_back(line.substr(i, j - i));
    i = j;
  }
}

std::optional<Timestamp> parse_time_field(std::string_view s) {
  if (auto t = parse_epoch_seconds(s)) return t;
  if (auto t = parse_datetime(s)) {
    if (*t < 0) return std::nullopt;
    return t;
  }
  return std::nullopt;
}

struct ColumnMap {
  int source = 0;
  int target = 1;
  int timestamp = 2;
  int kind = 3;
  int status = 4;
  std::size_t width = 0;  // 0: positional, accept 3..5 fields
};

int find_column(const std::vector<std::string>& header, std::initializer_list<std::string_view> aliases) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto h = lowercase(header[i]);
    for (auto a : aliases)
      if (h == a) return static_cast<int>(i);
  }
  return -1;
}

std::optional<ColumnMap> header_columns(const std::vector<std::string>& fields, bool aliases) {
  ColumnMap m;
  if (aliases) {
    m.source = find_column(fields, {"source", "src", "from", "user_a", "user1", "node1", "u"});
    m.target = find_column(fields, {"target", "dst", "to", "user_b", "user2", "node2", "v"});
    m.timestamp = find_column(fields, {"timestamp", "time", "t", "created_at", "date"});
    m.kind = find_column(fields, {"kind", "type", "interaction", "edge_type"});
    m.status = find_column(fields, {"status_id", "status", "tweet_id", "id"});
  } else {
    m.source = find_column(fields, {"source"});
    m.target = find_column(fields, {"target"});
    m.timestamp = find_column(fields, {"timestamp"});
    m.kind = find_column(fields, {"kind"});
    m.status = find_column(fields, {"status_id"});
  }
  if (m.source < 0 || m.target < 0) return std::nullopt;
  m.width = fields.size();
  return m;
}

class RecordSink {
 public:
  explicit RecordSink(ParseResult& r) : result_(r) {}

  void add(std::string_view source, std::string_view target, std::string_view time, std::string_view kind,
           std::optional<std::string_view> status) {
    if (source.empty() || target.empty()) return malformed();
    const auto t = parse_time_field(time);
    if (!t) return malformed();
    ContactKind k = ContactKind::unknown;
    if (!parse_kind(kind, k)) return malformed();
    if (source == target) {
      ++result_.stats.self_loops;
      return;
    }
    ContactEvent e;
    e.source = result_.log.users.intern(source);
    e.target = result_.log.users.intern(target);
    e.timestamp = *t;
    e.kind = k;
    if (status && !status->empty()) e.status = result_.log.statuses.intern(*status);
    result_.log.events.push_back(e);
    ++result_.stats.records_parsed;
  }

  void malformed() { ++result_.stats.malformed; }

 private:
  ParseResult& result_;
};

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line);
    pos = nl + 1;
  }
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

void parse_delimited(std::string_view text, bool osf, ParseResult& result) {
  RecordSink sink(result);
  std::optional<ColumnMap> columns;
  bool first = true;
  char delim = ',';
  bool whitespace = false;
  std::vector<std::string> fields;

  for_each_line(text, [&](std::string_view line) {
    if (is_blank(line)) {
      ++result.stats.blank_lines;
      return;
    }
    if (osf && !line.empty() && line.front() == '#') return;
    if (first) {
      first = false;
      if (osf) {
        if (line.find('\t') != std::string_view::npos) {
          delim = '\t';
        } else if (line.find(',') == std::string_view::npos) {
          whitespace = true;
        }
      }
      whitespace ? split_whitespace(line, fields) : (void)split_delimited(line, delim, fields);
      if (auto m = header_columns(fields, osf)) {
        columns = m;
        result.stats.header = true;
        return;
      }
    }
    if (whitespace) {
      split_whitespace(line, fields);
    } else if (!split_delimited(line, delim, fields)) {
      return sink.malformed();
    }
    auto get = [&](int idx) -> std::string_view {
      return idx >= 0 && static_cast<std::size_t>(idx) < fields.size() ? std::string_view(fields[idx])
                                                                        : std::string_view{};
    };
    if (columns) {
      if (fields.size() != columns->width || columns->timestamp < 0) return sink.malformed();
      std::optional<std::string_view> status;
      if (columns->status >= 0) status = get(columns->status);
      sink.add(get(columns->source), get(columns->target), get(columns->timestamp), get(columns->kind), status);
    } else {
      if (fields.size() < 3 || fields.size() > 5) return sink.malformed();
      std::optional<std::string_view> status;
      if (fields.size() == 5) status = get(4);
      sink.add(get(0), get(1), get(2), get(3), status);
    }
  });
}

std::optional<std::string> json_id(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  return std::nullopt;
}

void parse_jsonl(std::string_view text, ParseResult& result) {
  RecordSink sink(result);
  for_each_line(text, [&](std::string_view line) {
    if (is_blank(line)) {
      ++result.stats.blank_lines;
      return;
    }
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return sink.malformed();
    auto field = [&](const char* key) -> const nlohmann::json* {
      auto it = j.find(key);
      return it == j.end() ? nullptr : &*it;
    };
    const auto* src = field("source");
    const auto* dst = field("target");
    const auto* ts = field("timestamp");
    if (!src || !dst || !ts) return sink.malformed();
    const auto s = json_id(*src);
    const auto d = json_id(*dst);
    if (!s || !d) return sink.malformed();

    std::string time_text;
    if (ts->is_number_integer() || ts->is_number_unsigned()) {
      time_text = std::to_string(ts->get<std::int64_t>());
    } else if (ts->is_number_float()) {
      const double v = ts->get<double>();
      if (!(v >= 0.0) || v > 9.2e18) return sink.malformed();
      time_text = std::to_string(static_cast<Timestamp>(v));
    } else if (ts->is_string()) {
      time_text = ts->get<std::string>();
    } else {
      return sink.malformed();
    }

    std::string kind;
    if (const auto* k = field("kind"); k && !k->is_null()) {
      if (!k->is_string()) return sink.malformed();
      kind = k->get<std::string>();
    }
    std::optional<std::string> status;
    if (const auto* st = field("status_id"); st && !st->is_null()) {
      status = json_id(*st);
      if (!status) return sink.malformed();
    }
    std::optional<std::string_view> status_view;
    if (status) status_view = *status;
    sink.add(*s, *d, time_text, kind, status_view);
  });
}

}  // namespace

ParseResult parse_contacts(std::string_view text, InputFormat format) {
  ParseResult result;
  // UTF-8 byte order mark
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  switch (format) {
    case InputFormat::csv: parse_delimited(text, false, result); break;
    case InputFormat::osf: parse_delimited(text, true, result); break;
    case InputFormat::jsonl: parse_jsonl(text, result); break;
  }
  return result;
}

ParseResult parse_contacts(std::istream& in, InputFormat format) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("failed to read input stream");
  bytes = maybe_gunzip(std::move(bytes));
  return parse_contacts(std::string_view(bytes), format);
}

ParseResult load_contacts(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path.string() + "'");
  return parse_contacts(in, format);
}

namespace {

struct EventHash {
  std::size_t operator()(const ContactEvent& e) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(e.source);
    mix(e.target);
    mix(static_cast<std::uint64_t>(e.timestamp));
    mix(static_cast<std::uint64_t>(e.kind));
    mix(e.status);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<ContactEvent> deduplicate(std::span<const ContactEvent> events) {
  std::unordered_set<ContactEvent, EventHash> seen;
  seen.reserve(events.size());
  std::vector<ContactEvent> out;
  out.reserve(events.size());
  for (const auto& e : events)
    if (seen.insert(e).second) out.push_back(e);
  return out;
}

std::vector<ContactEvent> filter_window(std::span<const ContactEvent> events, Timestamp start, Timestamp end) {
  if (start >= end)
    throw ArgumentError("window start must precede window end (got " + std::to_string(start) +
                        " >= " + std::to_string(end) + ")");
  std::vector<ContactEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [&](const ContactEvent& e) { return start <= e.timestamp && e.timestamp < end; });
  return out;
}

TemporalGraph build_underlying_graph(const ContactLog& log, std::span<const ContactEvent> events, Timestamp t0,
                                     Timestamp horizon) {
  if (horizon <= t0) throw ArgumentError("graph horizon must be after t0");
  TemporalGraph g;
  g.t0 = t0;
  g.horizon = horizon;
  g.events.assign(events.begin(), events.end());
  for (const auto& e : g.events) {
    if (e.timestamp < t0 || e.timestamp >= horizon)
      throw ArgumentError("event at t=" + std::to_string(e.timestamp) + " lies outside the graph window [" +
                          std::to_string(t0) + ", " + std::to_string(horizon) + ")");
  }
  std::stable_sort(g.events.begin(), g.events.end(),
                   [](const ContactEvent& a, const ContactEvent& b) { return a.timestamp < b.timestamp; });

  constexpr std::uint64_t kUnmapped = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> user_map(log.users.size(), kUnmapped);
  std::vector<std::uint64_t> status_map(log.statuses.size(), kUnmapped);
  auto remap_user = [&](UserId id) {
    auto& slot = user_map.at(id);
    if (slot == kUnmapped) {
      slot = g.vertex_names.size();
      g.vertex_names.push_back(log.users.name(id));
    }
    return slot;
  };
  for (auto& e : g.events) {
    e.source = remap_user(e.source);
    e.target = remap_user(e.target);
    if (e.status != kNoStatus) {
      auto& slot = status_map.at(e.status);
      if (slot == kUnmapped) {
        slot = g.status_names.size();
        g.status_names.push_back(log.statuses.name(e.status));
      }
      e.status = slot;
    }
  }
  return g;
}

TemporalGraph build_underlying_graph(const ContactLog& log, Timestamp t0, Timestamp horizon) {
  return build_underlying_graph(log, log.events, t0, horizon);
}

}  // namespace wildfire
