#include "wildfire/time_util.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace wildfire {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  const char* first = s.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::optional<Timestamp> civil_to_epoch(int y, int mo, int d, int h, int mi, int sec) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + sec;
}

// Parses "+HH:MM", "+HHMM", "Z"; returns the offset in seconds.
std::optional<int> parse_offset(std::string_view s) {
  if (s.empty()) return 0;
  if (s == "Z" || s == "z") return 0;
  if (s[0] != '+' && s[0] != '-') return std::nullopt;
  const int sign = s[0] == '-' ? -1 : 1;
  int hh = 0, mm = 0;
  if (s.size() == 6 && s[3] == ':') {
    if (!read_int(s, 1, 2, hh) || !read_int(s, 4, 2, mm)) return std::nullopt;
  } else if (s.size() == 5) {
    if (!read_int(s, 1, 2, hh) || !read_int(s, 3, 2, mm)) return std::nullopt;
  } else if (s.size() == 3) {
    if (!read_int(s, 1, 2, hh)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  return sign * (hh * 3600 + mm * 60);
}

std::optional<Timestamp> parse_iso(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d)) return std::nullopt;
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ' && s[pos] != 't') return std::nullopt;
    ++pos;
    if (!read_int(s, pos, 2, h) || pos + 2 >= s.size() || s[pos + 2] != ':' || !read_int(s, pos + 3, 2, mi))
      return std::nullopt;
    pos += 5;
    if (pos < s.size() && s[pos] == ':') {
      if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      }
    }
  }
  const auto offset = parse_offset(s.substr(pos));
  if (!offset) return std::nullopt;
  auto t = civil_to_epoch(y, mo, d, h, mi, sec);
  if (!t) return std::nullopt;
  return *t - *offset;
}

// "Wed Apr 01 12:00:00 +0000 2020"
std::optional<Timestamp> parse_twitter(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (s.size() != 30 || s[3] != ' ' || s[7] != ' ' || s[10] != ' ' || s[19] != ' ' || s[25] != ' ')
    return std::nullopt;
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i)
    if (s.substr(4, 3) == kMonths[i]) mo = static_cast<int>(i) + 1;
  int d = 0, h = 0, mi = 0, sec = 0, y = 0;
  if (mo == 0 || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, h) || !read_int(s, 14, 2, mi) ||
      !read_int(s, 17, 2, sec) || !read_int(s, 26, 4, y))
    return std::nullopt;
  const auto offset = parse_offset(s.substr(20, 5));
  auto t = civil_to_epoch(y, mo, d, h, mi, sec);
  if (!t || !offset) return std::nullopt;
  return *t - *offset;
}

}  // namespace

std::optional<Timestamp> parse_datetime(std::string_view text) {
  if (auto t = parse_iso(text)) return t;
  return parse_twitter(text);
}

Timestamp parse_datetime_or_throw(std::string_view text) {
  if (auto t = parse_datetime(text)) return *t;
  throw ArgumentError("invalid date/time '" + std::string(text) + "' (expected ISO-8601, e.g. 2020-02-01)");
}

std::string format_datetime(Timestamp t) {
  using namespace std::chrono;
  const auto days = static_cast<int>(std::floor(static_cast<double>(t) / 86400.0));
  Timestamp rem = t - static_cast<Timestamp>(days) * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

Duration parse_duration(std::string_view text) {
  if (text.empty()) throw ArgumentError("empty duration");
  Duration unit = 1;
  std::string_view digits = text;
  switch (text.back()) {
    case 's': unit = 1; digits.remove_suffix(1); break;
    case 'm': unit = 60; digits.remove_suffix(1); break;
    case 'h': unit = 3600; digits.remove_suffix(1); break;
    case 'd': unit = 86400; digits.remove_suffix(1); break;
    case 'w': unit = 7 * 86400; digits.remove_suffix(1); break;
    default: break;
  }
  Duration value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty())
    throw ArgumentError("invalid duration '" + std::string(text) + "' (expected e.g. 4h, 24h, 1d, 3600)");
  if (value <= 0) throw ArgumentError("duration must be positive, got '" + std::string(text) + "'");
  return value * unit;
}

std::string format_duration(Duration d) {
  if (d > 86400 && d % 86400 == 0) return std::to_string(d / 86400) + "d";
  if (d > 0 && d % 3600 == 0) return std::to_string(d / 3600) + "h";
  if (d > 0 && d % 60 == 0) return std::to_string(d / 60) + "m";
  return std::to_string(d) + "s";
}

std::optional<Timestamp> parse_epoch_seconds(std::string_view text) {
  if (text.empty()) return std::nullopt;
  Timestamp whole = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, whole);
  if (ec == std::errc{} && ptr == last) {
    if (whole < 0) return std::nullopt;
    return whole;
  }
  double value = 0.0;
  auto [dptr, dec] = std::from_chars(first, last, value);
  if (dec != std::errc{} || dptr != last || !std::isfinite(value) || value < 0.0 || value > 9.2e18)
    return std::nullopt;
  return static_cast<Timestamp>(value);
}

}  // namespace wildfire
