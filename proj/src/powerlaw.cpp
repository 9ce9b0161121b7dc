#include <algorithm>
#include <cmath>
#include <limits>
#include <boost/math/tools/minima.hpp>

#include "wildfire/community.hpp"
#include "wildfire/parallel.hpp"
#include "wildfire/powerlaw.hpp"

namespace wildfire {

namespace {

// Compressed histogram: ascending distinct values with their counts.
struct Compact {
  std::vector<std::uint64_t> values;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
};

Compact compact(const SampleHistogram& hist) {
  Compact c;
  c.values.reserve(hist.size());
  c.counts.reserve(hist.size());
  for (const auto& [v, k] : hist) {
    if (v == 0) throw ArgumentError("power-law samples must be positive integers");
    if (k == 0) continue;
    c.values.push_back(v);
    c.counts.push_back(k);
    c.n += k;
  }
  return c;
}

// B_2j / (2j)!
constexpr double kBernoulli[] = {1.0 / 12.0,         -1.0 / 720.0,   1.0 / 30240.0,
                                 -1.0 / 1209600.0,   1.0 / 47900160.0, -691.0 / 1307674368000.0,
                                 1.0 / 74724249600.0};

double mle_alpha(double mean_log, std::uint64_t xmin) {
  auto objective = [&](double a) { return std::log(hurwitz_zeta(a, static_cast<double>(xmin))) + a * mean_log; };
  const int bits = std::numeric_limits<double>::digits / 2;
  return boost::math::tools::brent_find_minima(objective, 1.0 + 1e-9, 50.0, bits).first;
}

// KS over the tail starting at index j of c, for a given exponent.
double ks_tail(const Compact& c, std::size_t j, std::uint64_t n_tail, double alpha) {
  const auto xmin = c.values[j];
  const double z = hurwitz_zeta(alpha, static_cast<double>(xmin));
  const double nt = static_cast<double>(n_tail);
  double mass = 0.0;  // Σ t^-alpha for xmin <= t <= cur
  std::uint64_t cur = xmin - 1;
  std::uint64_t cum = 0;
  double d = 0.0;
  for (std::size_t k = j; k < c.values.size(); ++k) {
    const auto x = c.values[k];
    if (x - cur <= 64) {
      for (auto t = cur + 1; t < x; ++t) mass += std::pow(static_cast<double>(t), -alpha);
    } else {
      mass = z - hurwitz_zeta(alpha, static_cast<double>(x));
    }
    // just below the jump at x
    d = std::max(d, std::abs(static_cast<double>(cum) / nt - mass / z));
    mass += std::pow(static_cast<double>(x), -alpha);
    cur = x;
    cum += c.counts[k];
    d = std::max(d, std::abs(static_cast<double>(cum) / nt - mass / z));
  }
  return std::min(d, 1.0);
}

struct Suffix {
  std::vector<std::uint64_t> n_tail;
  std::vector<double> sum_log;
};

Suffix suffix_sums(const Compact& c) {
  const auto m = c.values.size();
  Suffix s{std::vector<std::uint64_t>(m + 1, 0), std::vector<double>(m + 1, 0.0)};
  for (std::size_t k = m; k-- > 0;) {
    s.n_tail[k] = s.n_tail[k + 1] + c.counts[k];
    s.sum_log[k] = s.sum_log[k + 1] + static_cast<double>(c.counts[k]) * std::log(static_cast<double>(c.values[k]));
  }
  return s;
}

DistributionFit fit_at(const Compact& c, const Suffix& s, std::size_t j) {
  DistributionFit f;
  f.xmin = c.values[j];
  f.n = c.n;
  f.n_tail = s.n_tail[j];
  const double nt = static_cast<double>(f.n_tail);
  f.alpha = mle_alpha(s.sum_log[j] / nt, f.xmin);
  f.ks_statistic = ks_tail(c, j, f.n_tail, f.alpha);
  f.loglik = -nt * std::log(hurwitz_zeta(f.alpha, static_cast<double>(f.xmin))) - f.alpha * s.sum_log[j];
  return f;
}

void check_fit_preconditions(const Compact& c) {
  if (c.n < kMinFitSamples)
    throw FitError(FitError::Kind::insufficient_data,
                   "power-law fit needs at least " + std::to_string(kMinFitSamples) + " samples, got " +
                       std::to_string(c.n));
  if (c.values.size() == 1)
    throw FitError(FitError::Kind::degenerate, "all samples are equal; no power law can be fitted");
  if (c.values.size() < 3)
    throw FitError(FitError::Kind::insufficient_support,
                   "power-law fit needs at least 3 distinct values, got " + std::to_string(c.values.size()));
}

DistributionFit fit_compact(const Compact& c) {
  check_fit_preconditions(c);
  const auto s = suffix_sums(c);
  const auto m = c.values.size();
  DistributionFit best;
  bool have = false;
  for (std::size_t j = 0; j + 2 <= m; ++j) {
    // candidates up to the 90th percentile: at most 90% of samples below xmin
    const auto below = c.n - s.n_tail[j];
    if (below * 10 > c.n * 9) break;
    auto f = fit_at(c, s, j);
    if (!have || f.ks_statistic < best.ks_statistic) {
      best = f;
      have = true;
    }
  }
  if (!have) throw FitError(FitError::Kind::insufficient_support, "no admissible xmin candidate");
  return best;
}

Compact compact_sorted(std::vector<std::uint64_t>& samples) {
  std::sort(samples.begin(), samples.end());
  Compact c;
  for (auto v : samples) {
    if (!c.values.empty() && c.values.back() == v) {
      ++c.counts.back();
    } else {
      c.values.push_back(v);
      c.counts.push_back(1);
    }
  }
  c.n = samples.size();
  return c;
}

}  // namespace

SampleHistogram to_histogram(std::span<const std::uint64_t> samples) {
  SampleHistogram h;
  for (auto v : samples) {
    if (v == 0) throw ArgumentError("power-law samples must be positive integers");
    ++h[v];
  }
  return h;
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw ArgumentError("hurwitz_zeta needs s > 1 and q > 0");
  constexpr int kDirect = 9;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(q + k, -s);
  const double a = q + kDirect;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // Euler-Maclaurin tail
  double rising = s;
  double apow = std::pow(a, -s - 1.0);
  const double a2 = a * a;
  for (std::size_t j = 0; j < std::size(kBernoulli); ++j) {
    const double term = kBernoulli[j] * rising * apow;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
    const double k = 2.0 * static_cast<double>(j) + 1.0;
    rising *= (s + k) * (s + k + 1.0);
    apow /= a2;
  }
  return sum;
}

DistributionFit fit_power_law(std::span<const std::uint64_t> samples) {
  std::vector<std::uint64_t> copy(samples.begin(), samples.end());
  if (std::find(copy.begin(), copy.end(), 0) != copy.end())
    throw ArgumentError("power-law samples must be positive integers");
  return fit_compact(compact_sorted(copy));
}

DistributionFit fit_power_law(const SampleHistogram& hist) { return fit_compact(compact(hist)); }

DistributionFit fit_power_law_fixed_xmin(const SampleHistogram& hist, std::uint64_t xmin) {
  if (xmin == 0) throw ArgumentError("xmin must be >= 1");
  const auto c = compact(hist);
  const auto j = static_cast<std::size_t>(std::lower_bound(c.values.begin(), c.values.end(), xmin) - c.values.begin());
  if (c.values.size() - j < 2)
    throw FitError(FitError::Kind::insufficient_support, "tail above xmin needs at least 2 distinct values");
  // evaluate with xmin itself as the cutoff even if it is not a sample value
  Compact tail;
  tail.values.assign(c.values.begin() + static_cast<std::ptrdiff_t>(j), c.values.end());
  tail.counts.assign(c.counts.begin() + static_cast<std::ptrdiff_t>(j), c.counts.end());
  tail.n = c.n;
  const auto s = suffix_sums(tail);
  DistributionFit f;
  f.xmin = xmin;
  f.n = c.n;
  f.n_tail = s.n_tail[0];
  const double nt = static_cast<double>(f.n_tail);
  f.alpha = mle_alpha(s.sum_log[0] / nt, xmin);
  f.ks_statistic = ks_distance(hist, f.alpha, xmin);
  f.loglik = -nt * std::log(hurwitz_zeta(f.alpha, static_cast<double>(xmin))) - f.alpha * s.sum_log[0];
  return f;
}

double ks_distance(const SampleHistogram& hist, double alpha, std::uint64_t xmin) {
  if (!(alpha > 1.0) || xmin == 0) throw ArgumentError("ks_distance needs alpha > 1 and xmin >= 1");
  auto c = compact(hist);
  const auto j = static_cast<std::size_t>(std::lower_bound(c.values.begin(), c.values.end(), xmin) - c.values.begin());
  std::uint64_t n_tail = 0;
  for (auto k = j; k < c.counts.size(); ++k) n_tail += c.counts[k];
  if (n_tail == 0) return 1.0;
  // shift so the first tail entry sits at xmin; a zero count keeps the CDF intact
  c.values.insert(c.values.begin() + static_cast<std::ptrdiff_t>(j), xmin);
  c.counts.insert(c.counts.begin() + static_cast<std::ptrdiff_t>(j), 0);
  if (j + 1 < c.values.size() && c.values[j + 1] == xmin) {
    c.values.erase(c.values.begin() + static_cast<std::ptrdiff_t>(j));
    c.counts.erase(c.counts.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return ks_tail(c, j, n_tail, alpha);
}

DiscretePowerLawSampler::DiscretePowerLawSampler(double alpha, std::uint64_t xmin)
    : alpha_(alpha), xmin_(xmin) {
  if (!(alpha > 1.0) || !std::isfinite(alpha) || xmin == 0)
    throw ArgumentError("power-law sampler needs alpha > 1 and xmin >= 1");
  zeta_ = hurwitz_zeta(alpha, static_cast<double>(xmin));
  constexpr std::size_t kTable = 1 << 16;
  ccdf_.resize(kTable + 1);
  // summed from the far end so small tail probabilities keep full precision
  ccdf_[kTable] = hurwitz_zeta(alpha, static_cast<double>(xmin + kTable)) / zeta_;
  for (std::size_t i = kTable; i-- > 0;)
    ccdf_[i] = ccdf_[i + 1] + std::pow(static_cast<double>(xmin + i), -alpha) / zeta_;
}

std::uint64_t DiscretePowerLawSampler::operator()(std::mt19937_64& rng) const {
  // u in (0, 1]; X = max{x : P(X >= x) >= u}
  const double u = 1.0 - std::generate_canonical<double, 64>(rng);
  const auto last = ccdf_.size() - 1;
  if (u > ccdf_[last]) {
    // first index whose ccdf drops below u, minus one
    auto it = std::upper_bound(ccdf_.begin(), ccdf_.end(), u, [](double a, double b) { return a > b; });
    return xmin_ + static_cast<std::uint64_t>(it - ccdf_.begin()) - 1;
  }
  // beyond the table: continuous approximation, then exact correction
  const double base = static_cast<double>(xmin_ + last) - 0.5;
  double guess = std::floor(base * std::pow(u / ccdf_[last], -1.0 / (alpha_ - 1.0)) + 0.5);
  guess = std::clamp(guess, static_cast<double>(xmin_ + last), 1e18);
  auto x = static_cast<std::uint64_t>(guess);
  auto ccdf = [&](std::uint64_t v) { return hurwitz_zeta(alpha_, static_cast<double>(v)) / zeta_; };
  for (int step = 0; step < 64 && x > xmin_ + last && ccdf(x) < u; ++step) --x;
  for (int step = 0; step < 64 && ccdf(x + 1) >= u; ++step) ++x;
  return x;
}

GoodnessOfFit goodness_of_fit(const DistributionFit& fit, std::span<const std::uint64_t> samples,
                              std::size_t n_resamples, std::uint64_t seed, unsigned threads) {
  return goodness_of_fit(fit, to_histogram(samples), n_resamples, seed, threads);
}

GoodnessOfFit goodness_of_fit(const DistributionFit& fit, const SampleHistogram& hist, std::size_t n_resamples,
                              std::uint64_t seed, unsigned threads) {
  if (!(fit.alpha > 1.0) || !std::isfinite(fit.alpha) || fit.xmin == 0)
    throw ArgumentError("invalid fit: alpha must exceed 1 and xmin must be >= 1");
  if (n_resamples < 100) throw ArgumentError("goodness of fit needs at least 100 resamples");
  const auto c = compact(hist);
  std::vector<std::uint64_t> below;
  std::uint64_t n_tail = 0;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    if (c.values[k] < fit.xmin)
      below.insert(below.end(), c.counts[k], c.values[k]);
    else
      n_tail += c.counts[k];
  }
  if (n_tail < 2) throw ArgumentError("invalid fit: fewer than 2 samples at or above xmin");
  const double observed = ks_distance(hist, fit.alpha, fit.xmin);
  const double p_tail = static_cast<double>(n_tail) / static_cast<double>(c.n);
  const DiscretePowerLawSampler sampler(fit.alpha, fit.xmin);

  std::vector<char> exceeds(n_resamples, 0);
  parallel_for(n_resamples, threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::uniform_int_distribution<std::size_t> pick(0, below.empty() ? 0 : below.size() - 1);
    std::vector<std::uint64_t> draw(c.n);
    for (auto& v : draw) {
      if (below.empty() || std::generate_canonical<double, 64>(rng) < p_tail)
        v = sampler(rng);
      else
        v = below[pick(rng)];
    }
    try {
      exceeds[r] = fit_compact(compact_sorted(draw)).ks_statistic > observed;
    } catch (const FitError&) {
      // a resample too degenerate to refit counts as not exceeding
    }
  });
  GoodnessOfFit g;
  g.n_resamples = n_resamples;
  g.seed = seed;
  g.p_value = static_cast<double>(std::count(exceeds.begin(), exceeds.end(), 1)) / static_cast<double>(n_resamples);
  return g;
}

}  // namespace wildfire
