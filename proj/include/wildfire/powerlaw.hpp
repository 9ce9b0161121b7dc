#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "wildfire/types.hpp"

namespace wildfire {

/// value -> multiplicity, values >= 1.
using SampleHistogram = std::map<std::uint64_t, std::uint64_t>;

SampleHistogram to_histogram(std::span<const std::uint64_t> samples);

struct DistributionFit {
  double alpha = 0.0;
  std::uint64_t xmin = 1;
  double ks_statistic = 1.0;
  std::uint64_t n_tail = 0;
  std::uint64_t n = 0;
  double loglik = 0.0;
};

class FitError : public ArgumentError {
 public:
  enum class Kind { insufficient_data, degenerate, insufficient_support };
  FitError(Kind kind, const std::string& what) : ArgumentError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint64_t kMinFitSamples = 50;

/// Hurwitz zeta ζ(s, q) = Σ_{k>=0} (k + q)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Discrete power law P(x) = x^-alpha / ζ(alpha, xmin) for x >= xmin.
///
/// For each candidate xmin (distinct sample values up to the 90th
/// percentile whose tail holds at least two distinct values) alpha maximises
/// the tail likelihood; the candidate with the smallest KS distance wins.
///
/// Throws FitError: fewer than 50 samples (insufficient_data), a single
/// distinct value (degenerate), fewer than three distinct values
/// (insufficient_support). Zero samples are an ArgumentError.
DistributionFit fit_power_law(std::span<const std::uint64_t> samples);
DistributionFit fit_power_law(const SampleHistogram& hist);

/// MLE alpha and KS for a fixed cutoff.
DistributionFit fit_power_law_fixed_xmin(const SampleHistogram& hist, std::uint64_t xmin);

/// Max |empirical CDF - model CDF| over the tail x >= xmin.
double ks_distance(const SampleHistogram& hist, double alpha, std::uint64_t xmin);

/// Exact inverse-transform sampler for the discrete power law above xmin.
class DiscretePowerLawSampler {
 public:
  DiscretePowerLawSampler(double alpha, std::uint64_t xmin);
  std::uint64_t operator()(std::mt19937_64& rng) const;

  double alpha() const { return alpha_; }
  std::uint64_t xmin() const { return xmin_; }

 private:
  double alpha_;
  std::uint64_t xmin_;
  double zeta_;
  std::vector<double> ccdf_;  // P(X >= xmin + i)
};

struct GoodnessOfFit {
  double p_value = 0.0;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
};

/// Semi-parametric bootstrap: each resample keeps the sample size, draws a
/// tail value from the fitted law with probability n_tail/n and otherwise a
/// uniformly chosen empirical value below xmin, then is refitted with its own
/// xmin search. p is the share of resamples whose KS exceeds the observed KS.
/// Throws ArgumentError for an invalid fit or n_resamples < 100.
GoodnessOfFit goodness_of_fit(const DistributionFit& fit, std::span<const std::uint64_t> samples,
                              std::size_t n_resamples, std::uint64_t seed, unsigned threads = 1);
GoodnessOfFit goodness_of_fit(const DistributionFit& fit, const SampleHistogram& hist, std::size_t n_resamples,
                              std::uint64_t seed, unsigned threads = 1);

}  // namespace wildfire
