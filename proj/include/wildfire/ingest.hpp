#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wildfire/types.hpp"

namespace wildfire {

enum class InputFormat {
  csv,
  jsonl,
  /// Delimited edge list as published alongside the interaction networks.
  /// Column names are matched against aliases, see parse_contacts().
  osf,
};

std::string_view to_string(InputFormat f);
InputFormat parse_input_format(std::string_view name);
/// Guesses from the extension (ignoring a trailing ".gz"): .jsonl/.ndjson -> jsonl,
/// .tsv/.txt/.edges -> osf, everything else csv.
InputFormat guess_input_format(const std::filesystem::path& path);

/// Insertion-ordered string interner. Ids are dense, starting at 0.
class IdTable {
 public:
  std::uint64_t intern(std::string_view name);
  const std::string& name(std::uint64_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::unordered_map<std::string, std::uint64_t> index_;
  std::vector<std::string> names_;
};

/// Events plus the tables that give their ids a meaning.
struct ContactLog {
  std::vector<ContactEvent> events;
  IdTable users;
  IdTable statuses;
};

struct ParseStats {
  std::uint64_t records_parsed = 0;
  std::uint64_t malformed = 0;
  std::uint64_t self_loops = 0;
  std::uint64_t blank_lines = 0;
  bool header = false;
};

struct ParseResult {
  ContactLog log;
  ParseStats stats;
};

/// Decodes gzip when the buffer starts with the gzip magic bytes; otherwise
/// returns the input unchanged. Throws IoError on corrupt compressed data.
std::string maybe_gunzip(std::string bytes);

/// Parses contact records from UTF-8 text. Malformed lines are skipped and
/// counted, never fatal; self-contacts are dropped and counted.
///
/// csv: optional header naming `source,target,timestamp[,kind][,status_id]`
/// in any order. Without a header columns are positional. Double-quoted
/// fields are supported.
///
/// jsonl: one object per line with the same field names. Ids may be strings
/// or integers; timestamps numbers or date strings.
///
/// osf: comma, tab or whitespace separated. Header names are matched
/// case-insensitively against aliases (source|src|from|user_a|user1|node1|u,
/// target|dst|to|user_b|user2|node2|v, timestamp|time|t|created_at|date,
/// kind|type|interaction|edge_type, status_id|status|tweet_id|id). A headerless
/// file is read positionally as source,target,timestamp[,kind].
///
/// Timestamps: integer or decimal epoch seconds (fraction truncated), ISO-8601,
/// or the Twitter created_at layout.
ParseResult parse_contacts(std::string_view text, InputFormat format);

/// Reads the whole stream (gzip auto-detected) and parses it.
ParseResult parse_contacts(std::istream& in, InputFormat format);

/// Throws IoError if the file cannot be read.
ParseResult load_contacts(const std::filesystem::path& path, InputFormat format);

/// Collapses exact duplicate records, keeping the first occurrence.
std::vector<ContactEvent> deduplicate(std::span<const ContactEvent> events);

/// Keeps events with start <= t < end, in input order.
std::vector<ContactEvent> filter_window(std::span<const ContactEvent> events, Timestamp start, Timestamp end);

/// G↓: every contact of the observation window [t0, horizon).
/// Vertex ids are dense in order of first appearance in the sorted events.
struct TemporalGraph {
  std::vector<std::string> vertex_names;
  std::vector<std::string> status_names;
  std::vector<ContactEvent> events;  // time-sorted; ids index vertex_names/status_names
  Timestamp t0 = 0;
  Timestamp horizon = 0;

  std::size_t vertex_count() const { return vertex_names.size(); }
  std::size_t event_count() const { return events.size(); }
};

/// Sorts the events by timestamp (stable) and compacts the id space to the
/// vertices that occur. Throws ArgumentError if horizon <= t0 or an event lies
/// outside [t0, horizon).
TemporalGraph build_underlying_graph(const ContactLog& log, std::span<const ContactEvent> events, Timestamp t0,
                                     Timestamp horizon);

/// Convenience overload using log.events.
TemporalGraph build_underlying_graph(const ContactLog& log, Timestamp t0, Timestamp horizon);

}  // namespace wildfire
