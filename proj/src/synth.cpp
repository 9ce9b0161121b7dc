#include <algorithm>
#include <cmath>
#include <random>

#include "wildfire/synth.hpp"
#include "wildfire/time_util.hpp"

namespace wildfire {

double RampConfig::multiplier(Timestamp t) const {
  const double s = static_cast<double>(width) / (2.0 * std::log(9.0));
  const double z = static_cast<double>(t - center_time) / s;
  return floor + (ceiling - floor) / (1.0 + std::exp(-z));
}

void SynthConfig::validate() const {
  if (n_users < 2) throw ArgumentError("synthetic stream needs at least 2 users");
  if (duration <= 0) throw ArgumentError("duration must be positive");
  if (rate_unit <= 0) throw ArgumentError("rate unit must be positive");
  if (!(pa_strength >= 0.0) || !std::isfinite(pa_strength)) throw ArgumentError("pa_strength must be >= 0");
  if (!(base_rate > 0.0) || !std::isfinite(base_rate)) throw ArgumentError("base_rate must be > 0");
  if (ramp) {
    if (!(ramp->floor >= 0.0) || !(ramp->floor < ramp->ceiling) || !std::isfinite(ramp->ceiling))
      throw ArgumentError("ramp needs 0 <= floor < ceiling");
    if (ramp->width <= 0) throw ArgumentError("ramp width must be positive");
  }
  std::size_t total = 0;
  for (const auto& c : communities) {
    if (c.size == 0) throw ArgumentError("planted communities must be non-empty");
    total += c.size;
  }
  if (total > n_users) throw ArgumentError("planted community sizes exceed n_users");
}

SynthConfig SynthConfig::defaults() {
  SynthConfig cfg;
  cfg.ramp = RampConfig{cfg.start + cfg.duration * 6 / 10, 1.0, 10.0, 2 * 86400};
  for (int k = 0; k < 8; ++k) {
    // merges spread over the ramp, from 4 days before to 3 days after its centre
    cfg.communities.push_back({1000, cfg.ramp->center_time + (k - 4) * 86400});
  }
  return cfg;
}

namespace {

// A set of users choosing partners among themselves. The urn holds one entry
// per contact endpoint so a uniform urn draw is degree-proportional.
struct Pool {
  std::vector<std::uint32_t> users;
  std::vector<std::uint32_t> urn;
};

ContactKind draw_kind(std::mt19937_64& rng) {
  const double u = std::generate_canonical<double, 64>(rng);
  if (u < 0.6) return ContactKind::retweet;
  if (u < 0.85) return ContactKind::reply;
  return ContactKind::quote;
}

}  // namespace

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  SynthOutput out;
  auto& ledger = out.ledger;

  for (std::size_t u = 0; u < cfg.n_users; ++u) out.log.users.intern("u" + std::to_string(u));

  // planted memberships in id order; the leftover block is community K
  const auto k = cfg.communities.size();
  ledger.membership.assign(cfg.n_users, static_cast<std::uint32_t>(k));
  std::vector<Pool> pools(k + 2);  // 0..k-1 planted, k leftover, k+1 merged
  std::size_t next_user = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < cfg.communities[c].size; ++i, ++next_user) {
      ledger.membership[next_user] = static_cast<std::uint32_t>(c);
      pools[c].users.push_back(static_cast<std::uint32_t>(next_user));
    }
    ledger.merge_times.push_back(cfg.communities[c].merge_time);
  }
  for (; next_user < cfg.n_users; ++next_user) pools[k].users.push_back(static_cast<std::uint32_t>(next_user));
  const auto merged = k + 1;

  std::vector<std::size_t> merge_order(k);
  for (std::size_t c = 0; c < k; ++c) merge_order[c] = c;
  std::stable_sort(merge_order.begin(), merge_order.end(), [&](auto a, auto b) {
    return cfg.communities[a].merge_time < cfg.communities[b].merge_time;
  });
  std::size_t merges_done = 0;

  if (cfg.ramp) ledger.transition_time = cfg.ramp->center_time;
  ledger.user_contacts.assign(cfg.n_users, 0);

  auto pick = [&](Pool& pool) -> std::uint32_t {
    const double n = static_cast<double>(pool.users.size());
    const double w = n + cfg.pa_strength * static_cast<double>(pool.urn.size());
    if (pool.urn.empty() || std::generate_canonical<double, 64>(rng) * w < n)
      return pool.users[std::uniform_int_distribution<std::size_t>(0, pool.users.size() - 1)(rng)];
    return pool.urn[std::uniform_int_distribution<std::size_t>(0, pool.urn.size() - 1)(rng)];
  };

  const Timestamp end = cfg.start + cfg.duration;
  std::vector<Timestamp> stamps;
  std::vector<double> pool_weight(pools.size());
  for (Timestamp ws = cfg.start; ws < end; ws += cfg.rate_unit) {
    const Timestamp we = std::min(end, ws + cfg.rate_unit);
    const double frac = static_cast<double>(we - ws) / static_cast<double>(cfg.rate_unit);
    const Timestamp mid = ws + (we - ws) / 2;
    const double mean = cfg.base_rate * frac * (cfg.ramp ? cfg.ramp->multiplier(mid) : 1.0);
    const auto count = mean > 0.0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0;
    ledger.window_start.push_back(ws);
    ledger.window_events.push_back(count);

    stamps.resize(count);
    std::uniform_int_distribution<Timestamp> in_window(ws, we - 1);
    for (auto& t : stamps) t = in_window(rng);
    std::sort(stamps.begin(), stamps.end());

    for (auto t : stamps) {
      while (merges_done < k && cfg.communities[merge_order[merges_done]].merge_time <= t) {
        auto& from = pools[merge_order[merges_done]];
        auto& to = pools[merged];
        to.users.insert(to.users.end(), from.users.begin(), from.users.end());
        to.urn.insert(to.urn.end(), from.urn.begin(), from.urn.end());
        from = Pool{};
        ++merges_done;
      }
      double total = 0.0;
      for (std::size_t p = 0; p < pools.size(); ++p) {
        pool_weight[p] = pools[p].users.size() >= 2 ? static_cast<double>(pools[p].users.size()) : 0.0;
        total += pool_weight[p];
      }
      // validate() guarantees n_users >= 2, but the pools may all be singletons
      if (total == 0.0) throw ArgumentError("no partner pool has two users");
      double u = std::generate_canonical<double, 64>(rng) * total;
      std::size_t p = 0;
      while (p + 1 < pools.size() && (pool_weight[p] == 0.0 || u >= pool_weight[p])) {
        u -= pool_weight[p];
        ++p;
      }
      auto& pool = pools[p];
      const auto src = pick(pool);
      auto tgt = pick(pool);
      while (tgt == src) tgt = pick(pool);
      pool.urn.push_back(src);
      pool.urn.push_back(tgt);
      ++ledger.user_contacts[src];
      ++ledger.user_contacts[tgt];

      ContactEvent e;
      e.source = src;
      e.target = tgt;
      e.timestamp = t;
      e.kind = draw_kind(rng);
      e.status = out.log.statuses.intern("t" + std::to_string(out.log.events.size()));
      out.log.events.push_back(e);
    }
  }
  ledger.n_events = out.log.events.size();
  return out;
}

nlohmann::json to_json(const SynthConfig& cfg) {
  nlohmann::json comms = nlohmann::json::array();
  for (const auto& c : cfg.communities) {
    nlohmann::json m = c.merge_time == INT64_MAX ? nlohmann::json(nullptr) : nlohmann::json(format_datetime(c.merge_time));
    comms.push_back({{"size", c.size}, {"merge_time", m}});
  }
  nlohmann::json j = {{"n_users", cfg.n_users},
                      {"start", format_datetime(cfg.start)},
                      {"duration", format_duration(cfg.duration)},
                      {"pa_strength", cfg.pa_strength},
                      {"base_rate", cfg.base_rate},
                      {"rate_unit", format_duration(cfg.rate_unit)},
                      {"communities", comms},
                      {"seed", cfg.seed}};
  if (cfg.ramp)
    j["ramp"] = {{"center_time", format_datetime(cfg.ramp->center_time)},
                 {"floor", cfg.ramp->floor},
                 {"ceiling", cfg.ramp->ceiling},
                 {"width", format_duration(cfg.ramp->width)}};
  else
    j["ramp"] = nullptr;
  return j;
}

nlohmann::json to_json(const SynthLedger& l) {
  nlohmann::json windows = nlohmann::json::array();
  for (std::size_t i = 0; i < l.window_start.size(); ++i)
    windows.push_back({{"start", l.window_start[i]}, {"events", l.window_events[i]}});
  nlohmann::json merges = nlohmann::json::array();
  for (auto t : l.merge_times) merges.push_back(t == INT64_MAX ? nlohmann::json(nullptr) : nlohmann::json(t));
  return {{"n_events", l.n_events},
          {"transition_time", l.transition_time ? nlohmann::json(*l.transition_time) : nlohmann::json(nullptr)},
          {"merge_times", merges},
          {"windows", windows},
          {"user_contacts", l.user_contacts},
          {"membership", l.membership}};
}

namespace {

Timestamp time_value(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<Timestamp>();
  if (v.is_string()) return parse_datetime_or_throw(v.get<std::string>());
  throw ArgumentError("expected a timestamp (ISO-8601 string or epoch seconds)");
}

Duration duration_value(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<Duration>();
  if (v.is_string()) return parse_duration(v.get<std::string>());
  throw ArgumentError("expected a duration (e.g. \"4h\" or seconds)");
}

}  // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("synth config must be a JSON object");
  auto cfg = SynthConfig::defaults();
  try {
    if (j.contains("n_users")) cfg.n_users = j["n_users"].get<std::size_t>();
    if (j.contains("start")) cfg.start = time_value(j["start"]);
    if (j.contains("duration")) cfg.duration = duration_value(j["duration"]);
    if (j.contains("pa_strength")) cfg.pa_strength = j["pa_strength"].get<double>();
    if (j.contains("base_rate")) cfg.base_rate = j["base_rate"].get<double>();
    if (j.contains("rate_unit")) cfg.rate_unit = duration_value(j["rate_unit"]);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    // default ramp and merge schedule follow a moved window
    const auto shift = cfg.start + cfg.duration * 6 / 10 - cfg.ramp->center_time;
    cfg.ramp->center_time += shift;
    for (auto& c : cfg.communities) c.merge_time += shift;
    // default communities keep their share of the population
    if (cfg.n_users / 10 == 0) cfg.communities.clear();
    for (auto& c : cfg.communities) c.size = cfg.n_users / 10;
    if (j.contains("ramp")) {
      const auto& r = j["ramp"];
      if (r.is_null()) {
        cfg.ramp.reset();
      } else {
        RampConfig ramp{cfg.start + cfg.duration * 6 / 10, 1.0, 10.0, 2 * 86400};
        if (r.contains("center_time")) ramp.center_time = time_value(r["center_time"]);
        if (r.contains("floor")) ramp.floor = r["floor"].get<double>();
        if (r.contains("ceiling")) ramp.ceiling = r["ceiling"].get<double>();
        if (r.contains("width")) ramp.width = duration_value(r["width"]);
        cfg.ramp = ramp;
      }
    }
    if (j.contains("communities")) {
      cfg.communities.clear();
      for (const auto& c : j["communities"]) {
        PlantedCommunity pc;
        pc.size = c.at("size").get<std::size_t>();
        if (c.contains("merge_time") && !c["merge_time"].is_null()) pc.merge_time = time_value(c["merge_time"]);
        cfg.communities.push_back(pc);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad synth config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace wildfire
