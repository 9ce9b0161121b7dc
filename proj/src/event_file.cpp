#include "wildfire/event_file.hpp"

#include <array>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace wildfire {

namespace {

constexpr std::array<char, 4> kMagic = {'W', 'F', 'E', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  auto v = static_cast<U>(value);
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>(v & 0xffu);
    v = static_cast<U>(v >> 8);
  }
  out.write(buf, sizeof buf);
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) throw IoError("truncated event file");
  std::make_unsigned_t<T> v = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) v = static_cast<std::make_unsigned_t<T>>((v << 8) | buf[i]);
  return static_cast<T>(v);
}

void put_strings(std::ostream& out, const std::vector<std::string>& names) {
  put_le<std::uint64_t>(out, names.size());
  for (const auto& n : names) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n.size()));
    out.write(n.data(), static_cast<std::streamsize>(n.size()));
  }
}

std::vector<std::string> get_strings(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  std::vector<std::string> names;
  names.reserve(std::min<std::uint64_t>(n, 1u << 24));
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = get_le<std::uint32_t>(in);
    std::string s(len, '\0');
    if (len > 0 && !in.read(s.data(), len)) throw IoError("truncated event file");
    names.push_back(std::move(s));
  }
  return names;
}

}  // namespace

void write_event_file(std::ostream& out, const TemporalGraph& graph, EventFileHeader header) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, header.source_size);
  put_le<std::int64_t>(out, header.source_mtime);
  put_le<std::int64_t>(out, graph.t0);
  put_le<std::int64_t>(out, graph.horizon);
  put_strings(out, graph.vertex_names);
  put_strings(out, graph.status_names);
  put_le<std::uint64_t>(out, graph.events.size());
  for (const auto& e : graph.events) {
    put_le<std::uint64_t>(out, e.source);
    put_le<std::uint64_t>(out, e.target);
    put_le<std::int64_t>(out, e.timestamp);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.kind));
    put_le<std::uint64_t>(out, e.status);
  }
  if (!out) throw IoError("failed writing event file");
}

void write_event_file(const std::filesystem::path& path, const TemporalGraph& graph, EventFileHeader header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_event_file(out, graph, header);
}

TemporalGraph read_event_file(std::istream& in, EventFileHeader* header) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("not a canonical event file");
  if (get_le<std::uint32_t>(in) != kVersion) throw IoError("unsupported event file version");
  EventFileHeader h;
  h.source_size = get_le<std::uint64_t>(in);
  h.source_mtime = get_le<std::int64_t>(in);
  if (header) *header = h;
  TemporalGraph g;
  g.t0 = get_le<std::int64_t>(in);
  g.horizon = get_le<std::int64_t>(in);
  g.vertex_names = get_strings(in);
  g.status_names = get_strings(in);
  const auto n = get_le<std::uint64_t>(in);
  g.events.reserve(std::min<std::uint64_t>(n, 1u << 26));
  for (std::uint64_t i = 0; i < n; ++i) {
    ContactEvent e;
    e.source = get_le<std::uint64_t>(in);
    e.target = get_le<std::uint64_t>(in);
    e.timestamp = get_le<std::int64_t>(in);
    const auto kind = get_le<std::uint8_t>(in);
    if (kind > static_cast<std::uint8_t>(ContactKind::unknown)) throw IoError("corrupt event record (kind)");
    e.kind = static_cast<ContactKind>(kind);
    e.status = get_le<std::uint64_t>(in);
    if (e.source >= g.vertex_names.size() || e.target >= g.vertex_names.size() ||
        (e.status != kNoStatus && e.status >= g.status_names.size()))
      throw IoError("corrupt event record (id out of range)");
    g.events.push_back(e);
  }
  return g;
}

TemporalGraph read_event_file(const std::filesystem::path& path, EventFileHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open event file '" + path.string() + "'");
  return read_event_file(in, header);
}

bool is_event_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 4> magic{};
  return in.read(magic.data(), magic.size()) && magic == kMagic;
}

namespace {

std::string csv_field(const std::string& s) {
  const bool padded = !s.empty() && (s.front() == ' ' || s.front() == '\t' || s.back() == ' ' || s.back() == '\t');
  if (!padded && s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_events_csv(std::ostream& out, std::span<const ContactEvent> events, const std::vector<std::string>& users,
                      const std::vector<std::string>& statuses) {
  out << "source,target,timestamp,kind,status_id\n";
  for (const auto& e : events) {
    out << csv_field(users.at(e.source)) << ',' << csv_field(users.at(e.target)) << ',' << e.timestamp << ','
        << to_string(e.kind) << ',';
    if (e.status != kNoStatus) out << csv_field(statuses.at(e.status));
    out << '\n';
  }
}

void write_events_jsonl(std::ostream& out, std::span<const ContactEvent> events, const std::vector<std::string>& users,
                        const std::vector<std::string>& statuses) {
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["source"] = users.at(e.source);
    j["target"] = users.at(e.target);
    j["timestamp"] = e.timestamp;
    j["kind"] = std::string(to_string(e.kind));
    if (e.status != kNoStatus) j["status_id"] = statuses.at(e.status);
    out << j.dump() << '\n';
  }
}

}  // namespace wildfire
