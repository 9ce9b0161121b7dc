#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wildfire/ingest.hpp"

namespace wildfire {

/// Canonical binary event file. All integers little-endian.
///
///   magic       4 bytes  "WFEV"
///   version     u32      1
///   source_size u64      byte size of the raw input this was built from (0 if none)
///   source_mtime i64     raw input mtime, implementation clock ticks (0 if none)
///   t0          i64
///   horizon     i64
///   n_users     u64, then n_users x { u32 length, bytes }
///   n_statuses  u64, then n_statuses x { u32 length, bytes }
///   n_events    u64, then n_events x 33-byte records:
///                 u64 source, u64 target, i64 timestamp, u8 kind, u64 status
///                 (status 0xFFFFFFFFFFFFFFFF means none)
struct EventFileHeader {
  std::uint64_t source_size = 0;
  std::int64_t source_mtime = 0;
};

void write_event_file(const std::filesystem::path& path, const TemporalGraph& graph, EventFileHeader header = {});
void write_event_file(std::ostream& out, const TemporalGraph& graph, EventFileHeader header = {});

/// Throws IoError on unreadable, truncated or foreign files.
TemporalGraph read_event_file(const std::filesystem::path& path, EventFileHeader* header = nullptr);
TemporalGraph read_event_file(std::istream& in, EventFileHeader* header = nullptr);

bool is_event_file(const std::filesystem::path& path);

/// `source,target,timestamp,kind,status_id` with a header line.
void write_events_csv(std::ostream& out, std::span<const ContactEvent> events, const std::vector<std::string>& users,
                      const std::vector<std::string>& statuses);
void write_events_jsonl(std::ostream& out, std::span<const ContactEvent> events, const std::vector<std::string>& users,
                        const std::vector<std::string>& statuses);

}  // namespace wildfire
