#pragma once

#include <span>

#include "snippet_smc/random_stream.hpp"
#include "snippet_smc/snippet.hpp"

namespace snippet_smc {

/// Inverse-Gaussian stepsize law nu_theta with mean theta and fixed skewness
/// s (shape lambda = 9 theta / s^2), the "mother" distribution a population
/// of stepsizes competes under.
struct EpsilonDistribution {
  double theta;
  double skewness;

  double shape() const { return 9.0 * theta / (skewness * skewness); }

  double log_density(double eps) const;

  /// Michael-Schucany-Haas transformation with uniform correction; the
  /// result is clamped to [1e-12, 1e12].
  double sample(RandomStream& rng) const;
};

/// Within-snippet weighted variance of an observable along the snippet
/// (default: the position coordinates), computed with the snippet's
/// normalized weights. This is the variance absorbed by averaging along the
/// snippet and serves as the fitness signal for stepsize adaptation.
/// Returns 0 when every weight is -inf.
double snippet_variance_criterion(const Snippet& snippet);

/// Closed-form fit of theta from (epsilon_i, v_i) pairs, v_i >= 0 acting as
/// weights: with m1 = sum(v eps)/sum(v) and mm1 = sum(v/eps)/sum(v),
///   theta = (s^2/9 + sqrt(s^4/81 + 4 m1 mm1)) / (2 mm1).
/// A zero total weight carries no information and returns fallback_theta.
double fit_epsilon_distribution(std::span<const double> epsilons, std::span<const double> v,
                                double skewness, double fallback_theta);

}  // namespace snippet_smc
