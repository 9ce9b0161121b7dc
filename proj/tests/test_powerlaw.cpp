#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wildfire/powerlaw.hpp"

using namespace wildfire;

namespace {

// direct partial sum with an integral tail correction
double zeta_oracle(double s, double q) {
  constexpr int N = 200000;
  double sum = 0;
  for (int k = N - 1; k >= 0; --k) sum += std::pow(k + q, -s);
  const double x = N + q;
  return sum + std::pow(x, 1 - s) / (s - 1) + 0.5 * std::pow(x, -s);
}

// inverse transform over an explicitly summed CDF table
class OracleSampler {
 public:
  OracleSampler(double alpha, std::uint64_t xmin, std::uint64_t cap = 2000000) : xmin_(xmin) {
    double z = 0;
    for (std::uint64_t x = xmin; x < xmin + cap; ++x) {
      z += std::pow(static_cast<double>(x), -alpha);
      cdf_.push_back(z);
    }
    for (auto& c : cdf_) c /= z;
  }
  std::uint64_t operator()(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    return xmin_ + static_cast<std::uint64_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::uint64_t xmin_;
  std::vector<double> cdf_;
};

std::vector<std::uint64_t> draw(const OracleSampler& s, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = s(rng);
  return v;
}

double loglik_oracle(const SampleHistogram& h, double alpha, std::uint64_t xmin) {
  double sum = 0, n = 0;
  for (auto [x, c] : h)
    if (x >= xmin) {
      sum += static_cast<double>(c) * std::log(static_cast<double>(x));
      n += static_cast<double>(c);
    }
  return -alpha * sum - n * std::log(zeta_oracle(alpha, static_cast<double>(xmin)));
}

double ks_oracle(const SampleHistogram& h, double alpha, std::uint64_t xmin) {
  double n = 0;
  for (auto [x, c] : h)
    if (x >= xmin) n += static_cast<double>(c);
  const double z = zeta_oracle(alpha, static_cast<double>(xmin));
  double d = 0, emp = 0, model = 0;
  const auto top = h.rbegin()->first;
  for (std::uint64_t x = xmin; x <= top; ++x) {
    // just below x both CDFs hold their previous values
    d = std::max(d, std::abs(emp - model));
    auto it = h.find(x);
    if (it != h.end()) emp += static_cast<double>(it->second) / n;
    model += std::pow(static_cast<double>(x), -alpha) / z;
    d = std::max(d, std::abs(emp - model));
  }
  return d;
}

}  // namespace

TEST_CASE("hurwitz zeta") {
  CHECK(hurwitz_zeta(2, 1) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-12));
  CHECK(hurwitz_zeta(4, 1) == doctest::Approx(std::pow(std::numbers::pi, 4) / 90).epsilon(1e-12));
  CHECK(hurwitz_zeta(3, 1) == doctest::Approx(1.2020569031595942).epsilon(1e-12));
  for (double s : {1.05, 1.5, 2.0, 2.7, 3.5, 6.0})
    for (double q : {1.0, 2.0, 7.0, 43.0, 1000.0}) CHECK(hurwitz_zeta(s, q) == doctest::Approx(zeta_oracle(s, q)).epsilon(1e-9));
}

TEST_CASE("alpha recovery on a pure power law") {
  for (double alpha : {2.0, 2.5, 3.0}) {
    const auto s = draw(OracleSampler(alpha, 1), 20000, static_cast<std::uint64_t>(alpha * 10));
    const auto fit = fit_power_law(s);
    CHECK(fit.alpha == doctest::Approx(alpha).epsilon(0.05));
    CHECK(fit.xmin <= 5);
    CHECK(fit.n == 20000);
  }
}

TEST_CASE("xmin recovery above a flat body") {
  std::mt19937_64 rng(4);
  auto tail = draw(OracleSampler(2.5, 20), 6000, 9);
  for (int i = 0; i < 4000; ++i) tail.push_back(1 + rng() % 19);
  const auto fit = fit_power_law(tail);
  CHECK(fit.xmin >= 15);
  CHECK(fit.xmin <= 30);
  CHECK(fit.alpha == doctest::Approx(2.5).epsilon(0.08));
}

TEST_CASE("fit statistics agree with direct formulas") {
  const auto h = to_histogram(draw(OracleSampler(2.2, 3), 3000, 17));
  const auto fit = fit_power_law_fixed_xmin(h, 3);
  CHECK(fit.xmin == 3);
  CHECK(fit.n_tail == 3000);
  CHECK(fit.loglik == doctest::Approx(loglik_oracle(h, fit.alpha, 3)).epsilon(1e-9));
  for (double da : {-0.05, 0.05}) CHECK(loglik_oracle(h, fit.alpha + da, 3) < fit.loglik);
  CHECK(fit.ks_statistic == doctest::Approx(ks_oracle(h, fit.alpha, 3)).epsilon(1e-7));
  CHECK(ks_distance(h, 2.7, 3) == doctest::Approx(ks_oracle(h, 2.7, 3)).epsilon(1e-7));
}

TEST_CASE("fit is unchanged by sample order and by uniformly repeating samples") {
  auto s = draw(OracleSampler(2.4, 2), 2000, 23);
  const auto a = fit_power_law(s);
  std::shuffle(s.begin(), s.end(), std::mt19937_64(1));
  const auto b = fit_power_law(s);
  CHECK(a.alpha == b.alpha);
  CHECK(a.xmin == b.xmin);
  auto h = to_histogram(s);
  for (auto& [x, c] : h) c *= 3;
  const auto c = fit_power_law(h);
  CHECK(c.xmin == a.xmin);
  CHECK(c.alpha == doctest::Approx(a.alpha).epsilon(1e-7));
  CHECK(c.ks_statistic == doctest::Approx(a.ks_statistic).epsilon(1e-9));
  CHECK(c.n == 3 * a.n);
}

TEST_CASE("heavier tails fit smaller exponents") {
  double prev = 0;
  for (double alpha : {1.8, 2.2, 2.8, 3.4}) {
    const auto fit = fit_power_law_fixed_xmin(to_histogram(draw(OracleSampler(alpha, 1), 10000, 31)), 1);
    CHECK(fit.alpha > prev);
    prev = fit.alpha;
  }
}

TEST_CASE("library sampler matches the power law") {
  const DiscretePowerLawSampler s(2.5, 4);
  std::mt19937_64 rng(3);
  const std::size_t n = 200000;
  SampleHistogram h;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = s(rng);
    REQUIRE(x >= 4);
    ++h[x];
  }
  const double z = zeta_oracle(2.5, 4);
  for (std::uint64_t x = 4; x < 12; ++x) {
    const double p = std::pow(static_cast<double>(x), -2.5) / z;
    const double sd = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(h[x]) / n - p) < 5 * sd);
  }
  CHECK(ks_oracle(h, 2.5, 4) < 0.01);
}

TEST_CASE("goodness of fit separates power law from geometric data") {
  const auto pl = draw(OracleSampler(2.5, 1), 3000, 41);
  const auto good = fit_power_law(pl);
  const auto gp = goodness_of_fit(good, pl, 100, 5);
  CHECK(gp.p_value > 0.1);
  CHECK(gp.n_resamples == 100);

  std::mt19937_64 rng(6);
  std::geometric_distribution<std::uint64_t> geo(0.08);
  std::vector<std::uint64_t> g(3000);
  for (auto& x : g) x = 1 + geo(rng);
  const auto bad = fit_power_law(g);
  const auto bp = goodness_of_fit(bad, g, 100, 5);
  CHECK(bp.p_value < 0.1);

  // parallel bootstrap is bit-identical
  CHECK(goodness_of_fit(good, pl, 100, 5, 3).p_value == gp.p_value);
  CHECK_THROWS_AS(goodness_of_fit(good, pl, 99, 5), ArgumentError);
}

TEST_CASE("fit errors") {
  const std::vector<std::uint64_t> few(49, 3);
  try {
    fit_power_law(std::vector<std::uint64_t>{few.begin(), few.end()});
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::insufficient_data);
  }
  try {
    fit_power_law(std::vector<std::uint64_t>(60, 3));
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::degenerate);
  }
  std::vector<std::uint64_t> two(60, 1);
  std::fill(two.begin(), two.begin() + 20, 2);
  try {
    fit_power_law(two);
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::insufficient_support);
  }
  std::vector<std::uint64_t> zero(60, 2);
  zero[0] = 0;
  CHECK_THROWS_AS(fit_power_law(zero), ArgumentError);
}
