#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "wildfire/ingest.hpp"

namespace wildfire {

/// Logistic activity multiplier floor + (ceiling - floor)·σ((t - center)/s),
/// where `width` is the 10%–90% rise time, i.e. s = width / (2 ln 9).
struct RampConfig {
  Timestamp center_time = 0;
  double floor = 1.0;
  double ceiling = 10.0;
  Duration width = 2 * 86400;

  double multiplier(Timestamp t) const;
};

struct PlantedCommunity {
  std::size_t size = 0;
  /// From this time on the community's users share one partner pool with
  /// every other merged community. INT64_MAX keeps it separate.
  Timestamp merge_time = INT64_MAX;
};

struct SynthConfig {
  std::size_t n_users = 10000;
  Timestamp start = 1580515200;  // 2020-02-01T00:00:00Z
  Duration duration = 100 * 86400;
  /// Partner weight is 1 + pa_strength × current contact count.
  double pa_strength = 1.0;
  /// Expected events per rate_unit before the ramp multiplier.
  double base_rate = 20.0;
  Duration rate_unit = 4 * 3600;
  std::optional<RampConfig> ramp;
  /// Users beyond Σ sizes form one extra community that never merges.
  std::vector<PlantedCommunity> communities;
  std::uint64_t seed = 1;

  /// Throws ArgumentError when infeasible.
  void validate() const;
  /// Ramp centred at 60% of the duration, eight merging communities.
  static SynthConfig defaults();
};

struct SynthLedger {
  std::vector<Timestamp> window_start;       // one per rate_unit window
  std::vector<std::uint64_t> window_events;  // events emitted in that window
  std::vector<std::uint64_t> user_contacts;  // final contact count (endpoint occurrences) per user id
  std::vector<std::uint32_t> membership;     // planted community per user id; leftovers get communities.size()
  std::vector<Timestamp> merge_times;        // per planted community
  std::optional<Timestamp> transition_time;  // ramp centre
  std::uint64_t n_events = 0;
};

struct SynthOutput {
  ContactLog log;  // user ids 0..n_users-1 named "u<id>", one status per event
  SynthLedger ledger;
};

/// Draws per-window Poisson event counts from the (ramped) rate, spreads
/// timestamps uniformly inside each window, then picks both endpoints with
/// preferential attachment inside one partner pool chosen in proportion to
/// its size. Events come out time-sorted. Deterministic per config.
SynthOutput generate(const SynthConfig& cfg);

nlohmann::json to_json(const SynthConfig& cfg);
nlohmann::json to_json(const SynthLedger& ledger);
/// Missing keys keep their defaults(); times accept ISO-8601 strings or epoch seconds,
/// durations accept "4h"-style strings or seconds.
SynthConfig synth_config_from_json(const nlohmann::json& j);

}  // namespace wildfire
