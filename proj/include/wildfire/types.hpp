#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wildfire {

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;
/// Seconds.
using Duration = std::int64_t;

/// Dense index of a user. Inside a TemporalGraph this is the vertex id.
using UserId = std::uint64_t;
using VertexId = std::uint32_t;

inline constexpr std::uint64_t kNoStatus = std::numeric_limits<std::uint64_t>::max();

enum class ContactKind : std::uint8_t { retweet = 0, reply = 1, quote = 2, unknown = 3 };

std::string_view to_string(ContactKind kind);
/// Accepts the canonical names plus a few common aliases ("rt", "comment").
/// Returns false for anything else.
bool parse_kind(std::string_view text, ContactKind& out);

struct ContactEvent {
  UserId source = 0;
  UserId target = 0;
  Timestamp timestamp = 0;
  ContactKind kind = ContactKind::unknown;
  std::uint64_t status = kNoStatus;

  friend bool operator==(const ContactEvent&, const ContactEvent&) = default;
};

/// Half-open time interval [start, end).
struct TimeInterval {
  Timestamp start = 0;
  Timestamp end = 0;

  bool contains(Timestamp t) const { return start <= t && t < end; }
  Duration length() const { return end - start; }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Bad caller input (maps to CLI exit code 2).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or unwritable file (maps to CLI exit code 1).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wildfire
