#include <algorithm>
#include <cmath>
#include <limits>

#include "wildfire/transition.hpp"

namespace wildfire {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median_of(std::vector<double>& v) {
  const auto n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return lo + (hi - lo) / 2.0;
}

void check_values(std::span<const double> values) {
  for (auto v : values)
    if (!std::isfinite(v) || v < 0.0) throw ArgumentError("transition series values must be finite and >= 0");
}

// Differencing (if asked) then division by the maximum: a series and any
// positive multiple of it map to the same normalised values.
std::vector<double> prepare(std::span<const double> values, bool difference) {
  check_values(values);
  std::vector<double> x(values.begin(), values.end());
  if (difference) {
    for (std::size_t i = x.size(); i-- > 1;) x[i] -= x[i - 1];
    for (auto v : x)
      if (v < 0.0) throw ArgumentError("differenced series is negative; the input is not cumulative");
  }
  const double peak = x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
  if (peak > 0.0)
    for (auto& v : x) v /= peak;
  return x;
}

void check_config(const TransitionConfig& cfg) {
  if (cfg.sustain == 0 || cfg.baseline_window == 0) throw ArgumentError("baseline and sustain windows must be >= 1");
  if (!(cfg.ramp_factor > 0.0)) throw ArgumentError("ramp factor must be > 0");
  if (!std::isfinite(cfg.decay)) throw ArgumentError("decay threshold must be finite");
  if (!(cfg.spike_z > 0.0)) throw ArgumentError("spike z threshold must be > 0");
  if (cfg.local_window < 2) throw ArgumentError("local window must be >= 2");
}

std::vector<Precursor> precursors_on(const std::vector<double>& x, std::span<const double> raw,
                                     const TransitionConfig& cfg, std::size_t before) {
  const auto n = x.size();
  const auto half = cfg.local_window / 2;
  const auto limit = std::min(n, before > 0 ? before - 1 : 0);  // 0-based positions < before-1
  std::vector<std::size_t> flagged;
  std::vector<double> zs(n, 0.0), medians(n, 0.0);
  std::vector<double> window, dev;
  for (std::size_t i = 0; i < limit; ++i) {
    const auto lo = i >= half ? i - half : 0;
    const auto hi = std::min(n, i + half + 1);
    window.clear();
    for (auto j = lo; j < hi; ++j)
      if (j != i) window.push_back(x[j]);
    if (window.empty()) continue;
    const double med = median_of(window);
    dev.clear();
    double abs_sum = 0.0;
    for (auto v : window) {
      dev.push_back(std::abs(v - med));
      abs_sum += dev.back();
    }
    const double mad = median_of(dev);
    const double sd = std::max(1.4826 * mad, 1.2533 * abs_sum / static_cast<double>(dev.size()));
    const double excess = x[i] - med;
    double z = 0.0;
    if (sd > 0.0)
      z = excess / sd;
    else if (excess > 0.0)
      z = kInf;
    if (z >= cfg.spike_z) {
      flagged.push_back(i);
      zs[i] = z;
      medians[i] = med;
    }
  }
  // scale back from normalised units so reported values match the input
  const double scale = [&] {
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > 0.0) return (cfg.difference ? (i ? raw[i] - raw[i - 1] : raw[i]) : raw[i]) / x[i];
    return 1.0;
  }();
  std::vector<Precursor> out;
  for (std::size_t k = 0; k < flagged.size();) {
    auto end = k + 1;
    while (end < flagged.size() && flagged[end] == flagged[end - 1] + 1) ++end;
    auto peak = flagged[k];
    for (auto m = k + 1; m < end; ++m) {
      const auto i = flagged[m];
      if (zs[i] > zs[peak] || (zs[i] == zs[peak] && x[i] > x[peak])) peak = i;
    }
    Precursor p;
    p.slice = peak + 1;
    p.first = flagged[k] + 1;
    p.last = flagged[end - 1] + 1;
    p.value = x[peak] * scale;
    p.local_median = medians[peak] * scale;
    p.z = zs[peak];
    out.push_back(p);
    k = end;
  }
  return out;
}

}  // namespace

double Precursor::magnitude() const { return local_median > 0.0 ? value / local_median : kInf; }

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::pre: return "pre";
    case Phase::during: return "during";
    case Phase::post: return "post";
  }
  return "?";
}

std::vector<std::size_t> TransitionReport::precursor_slices() const {
  std::vector<std::size_t> out;
  for (const auto& p : precursors) out.push_back(p.slice);
  return out;
}

std::vector<Precursor> detect_precursors(std::span<const double> values, const TransitionConfig& cfg,
                                         std::size_t before) {
  check_config(cfg);
  if (values.size() < cfg.local_window)
    throw ArgumentError("precursor detection needs at least local_window (" + std::to_string(cfg.local_window) +
                        ") slices");
  return precursors_on(prepare(values, cfg.difference), values, cfg, before);
}

TransitionReport detect_transition(const TimeSeries& series, const TransitionConfig& cfg) {
  auto r = detect_transition(std::span<const double>(series.values), cfg);
  r.series = series.label;
  return r;
}

TransitionReport detect_transition(std::span<const double> values, const TransitionConfig& cfg) {
  check_config(cfg);
  const auto ws = cfg.sustain;
  const auto wb = cfg.baseline_window;
  if (values.size() < wb + ws)
    throw ArgumentError("transition detection needs at least baseline_window + sustain (" + std::to_string(wb + ws) +
                        ") slices, got " + std::to_string(values.size()));
  const auto x = prepare(values, cfg.difference);
  const auto n = x.size();

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  auto trailing = [&](std::size_t p) { return (prefix[p + 1] - prefix[p + 1 - ws]) / static_cast<double>(ws); };

  // C(p): trailing mean over [p-ws+1, p] beats r × median of the wb slices before it
  std::vector<char> crossing(n, 0);
  std::vector<double> base;
  for (std::size_t p = 2 * ws - 1; p < n; ++p) {
    const auto hi = p + 1 - ws;
    const auto lo = hi > wb ? hi - wb : 0;
    base.assign(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
    const double b = median_of(base);
    const double t = trailing(p);
    crossing[p] = b > 0.0 ? t > cfg.ramp_factor * b : t > 0.0;
  }

  TransitionReport r;
  r.length = n;
  r.config = cfg;
  r.onset_slice = r.end_slice = n + 1;
  for (std::size_t p = 0; p + ws <= n; ++p) {
    bool sustained = true;
    for (std::size_t q = p; q < p + ws && sustained; ++q) sustained = crossing[q];
    if (!sustained) continue;
    r.transition = true;
    r.onset_slice = p + 1;
    for (auto q = p + 1; q < n; ++q) {
      const double prev = trailing(q - 1);
      if (prev > 0.0 && trailing(q) / prev - 1.0 < cfg.decay) {
        r.end_slice = q + 1;
        break;
      }
    }
    break;
  }
  r.phases = {SliceRange{1, r.onset_slice}, SliceRange{r.onset_slice, r.end_slice}, SliceRange{r.end_slice, n + 1}};
  if (n >= cfg.local_window) r.precursors = precursors_on(x, values, cfg, r.onset_slice);
  return r;
}

std::array<TimeInterval, 3> phase_windows(const TransitionReport& report, const SliceSpec& spec) {
  spec.validate();
  auto at = [&](std::size_t slice) {
    const auto t = spec.t0 + static_cast<Timestamp>(slice - 1) * spec.delta_t;
    return std::min(t, spec.horizon);
  };
  std::array<TimeInterval, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& ph = report.phases[k];
    if (ph.begin == 0 || ph.end < ph.begin) throw ArgumentError("malformed transition report");
    out[k] = TimeInterval{at(ph.begin), at(ph.end)};
  }
  // the last phase always runs to the horizon
  out[2].end = spec.horizon;
  if (!report.transition) {
    out[0] = TimeInterval{spec.t0, spec.horizon};
    out[1] = out[2] = TimeInterval{spec.horizon, spec.horizon};
  }
  return out;
}

PhaseAnnd annd_by_phase(const TemporalGraph& g, const TransitionReport& report, const SliceSpec& spec) {
  PhaseAnnd out;
  out.windows = phase_windows(report, spec);
  const auto& ev = g.events;
  auto by_time = [](const ContactEvent& e, Timestamp t) { return e.timestamp < t; };
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& w = out.windows[k];
    const auto name = std::string(to_string(static_cast<Phase>(k)));
    if (w.end <= w.start) {
      out.warnings.push_back(name + " phase is empty; ANND omitted");
      continue;
    }
    const auto first = std::lower_bound(ev.begin(), ev.end(), w.start, by_time);
    const auto last = std::lower_bound(first, ev.end(), w.end, by_time);
    const auto view = slice_view(std::span<const ContactEvent>(first, last));
    if (view.graph.edge_count() == 0) {
      out.warnings.push_back(name + " phase has no contacts; ANND omitted");
      continue;
    }
    out.curves[k] = annd_curve(view.graph);
    out.scatter[k] = annd_scatter(view.graph);
    for (auto& p : out.scatter[k]) p.vertex = view.active[p.vertex];
  }
  return out;
}

nlohmann::json to_json(const TransitionConfig& cfg) {
  return {{"baseline_window", cfg.baseline_window}, {"ramp_factor", cfg.ramp_factor},
          {"sustain", cfg.sustain},                 {"decay", cfg.decay},
          {"spike_z", cfg.spike_z},                 {"local_window", cfg.local_window},
          {"difference", cfg.difference}};
}

nlohmann::json to_json(const TransitionReport& r) {
  nlohmann::json phases = nlohmann::json::object();
  for (std::size_t k = 0; k < 3; ++k)
    phases[std::string(to_string(static_cast<Phase>(k)))] = {r.phases[k].begin, r.phases[k].end};
  nlohmann::json pre = nlohmann::json::array();
  for (const auto& p : r.precursors) {
    nlohmann::json j = {{"slice", p.slice}, {"first", p.first}, {"last", p.last},
                        {"value", p.value}, {"local_median", p.local_median}};
    // infinite z (zero local spread) and magnitude (zero median) become null
    j["z"] = std::isfinite(p.z) ? nlohmann::json(p.z) : nlohmann::json(nullptr);
    j["magnitude"] = std::isfinite(p.magnitude()) ? nlohmann::json(p.magnitude()) : nlohmann::json(nullptr);
    pre.push_back(std::move(j));
  }
  nlohmann::json j = {{"series", r.series},
                      {"length", r.length},
                      {"transition", r.transition},
                      {"onset_slice", r.onset_slice},
                      {"end_slice", r.end_slice},
                      {"phases", phases},
                      {"precursor_slices", r.precursor_slices()},
                      {"precursors", pre},
                      {"config", to_json(r.config)}};
  if (!r.transition) j["flag"] = "no transition";
  return j;
}

}  // namespace wildfire
