#include <doctest.h>

#include <ctime>
#include <random>

#include "wildfire/time_util.hpp"

using namespace wildfire;

namespace {

// libc's timegm is the oracle for calendar arithmetic
Timestamp civil(int y, int mo, int d, int h = 0, int mi = 0, int s = 0) {
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return static_cast<Timestamp>(timegm(&tm));
}

}  // namespace

TEST_CASE("datetime layouts") {
  CHECK(parse_datetime("2020-02-01") == civil(2020, 2, 1));
  CHECK(parse_datetime("2020-05-11T00:00:00Z") == civil(2020, 5, 11));
  CHECK(parse_datetime("2020-04-01 12:30") == civil(2020, 4, 1, 12, 30));
  CHECK(parse_datetime("2020-04-01T12:30:15.999Z") == civil(2020, 4, 1, 12, 30, 15));
  CHECK(parse_datetime("2020-04-01T12:00:00+02:00") == civil(2020, 4, 1, 10));
  CHECK(parse_datetime("Wed Apr 01 12:00:00 +0000 2020") == civil(2020, 4, 1, 12));
  CHECK_FALSE(parse_datetime("2020-13-01"));
  CHECK_FALSE(parse_datetime("yesterday"));
  CHECK_THROWS_AS(parse_datetime_or_throw("nope"), ArgumentError);
}

TEST_CASE("datetime format round trip against timegm") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Timestamp> t(0, civil(2100, 1, 1));
  for (int i = 0; i < 2000; ++i) {
    const auto x = t(rng);
    const auto text = format_datetime(x);
    REQUIRE(parse_datetime(text) == x);
    std::tm tm{};
    const std::time_t tt = x;
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    REQUIRE(text == buf);
  }
}

TEST_CASE("durations") {
  CHECK(parse_duration("4h") == 14400);
  CHECK(parse_duration("24h") == 86400);
  CHECK(parse_duration("1d") == 86400);
  CHECK(parse_duration("30m") == 1800);
  CHECK(parse_duration("2w") == 14 * 86400);
  CHECK(parse_duration("90") == 90);
  CHECK(parse_duration("90s") == 90);
  CHECK_THROWS_AS(parse_duration("0"), ArgumentError);
  CHECK_THROWS_AS(parse_duration("-1h"), ArgumentError);
  CHECK_THROWS_AS(parse_duration("4x"), ArgumentError);
  CHECK_THROWS_AS(parse_duration(""), ArgumentError);
  CHECK(format_duration(14400) == "4h");
  CHECK(format_duration(86400) == "24h");
  CHECK(format_duration(90) == "90s");
  for (Duration d : {1, 59, 60, 3600, 5400, 86400, 172800, 100 * 86400}) CHECK(parse_duration(format_duration(d)) == d);
}

TEST_CASE("epoch seconds") {
  CHECK(parse_epoch_seconds("100") == 100);
  CHECK(parse_epoch_seconds("100.9") == 100);
  CHECK_FALSE(parse_epoch_seconds("-5"));
  CHECK_FALSE(parse_epoch_seconds("nan"));
  CHECK_FALSE(parse_epoch_seconds("12a"));
}
