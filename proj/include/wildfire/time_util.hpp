#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "wildfire/types.hpp"

namespace wildfire {

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with an optional "Z" or
/// "+HH:MM" suffix (a space may replace the "T"), and the Twitter created_at
/// layout "Wed Apr 01 12:00:00 +0000 2020". Fractional seconds are truncated.
std::optional<Timestamp> parse_datetime(std::string_view text);

/// Like parse_datetime but throws ArgumentError naming the offending text.
Timestamp parse_datetime_or_throw(std::string_view text);

/// "2020-04-01T00:00:00Z"
std::string format_datetime(Timestamp t);

/// Parses "90", "90s", "30m", "4h", "1d", "2w". Throws ArgumentError when the
/// text is malformed or the duration is not positive.
Duration parse_duration(std::string_view text);

/// Shortest exact rendering, e.g. 14400 -> "4h", 90 -> "90s".
std::string format_duration(Duration d);

/// Parses an integer or decimal number of epoch seconds, truncating any
/// fraction. Rejects negatives, NaN and infinities.
std::optional<Timestamp> parse_epoch_seconds(std::string_view text);

}  // namespace wildfire
