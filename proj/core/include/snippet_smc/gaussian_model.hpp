#pragma once

#include "snippet_smc/tempered_target.hpp"

namespace snippet_smc {

// Diagonal Gaussian target. The prior is N(0, diag(sigma^2)); an optional
// Gaussian likelihood kernel exp(-0.5 * sum_i lambda_i x_i^2) gives the model
// a nontrivial tempering path with closed-form evidence, used as a test
// oracle. With all lambda_i = 0 the target is the prior at every gamma.
class GaussianTarget final : public TemperedTarget {
 public:
  explicit GaussianTarget(Vector variances,
                          Vector likelihood_precisions = Vector());

  Eigen::Index dimension() const override { return variances_.size(); }
  double log_prior(const Vector& x) const override;
  double log_likelihood(const Vector& x) const override;
  Vector grad_log_prior(const Vector& x) const override;
  Vector grad_log_likelihood(const Vector& x) const override;
  Vector sample_prior(RandomStream& rng) const override;

  const Vector& variances() const { return variances_; }
  const Vector& likelihood_precisions() const { return precisions_; }

  /// Exact log Z(gamma)/Z(0) of the tempered family, per coordinate
  /// -0.5 * log(1 + gamma * lambda_i * sigma_i^2).
  double log_evidence(double gamma) const;

  /// Hamiltonian H = sum_i x_i^2 / (2 sigma_i^2) + |v|^2 / 2 whose flow
  /// exact_gaussian_flow integrates.
  double hamiltonian(const PhaseState& z) const;

 private:
  Vector variances_;
  Vector precisions_;  // likelihood kernel precisions lambda_i
  double log_prior_norm_;
};

/// Exact Hamilton flow of H = sum_i x_i^2/(2 sigma_i^2) + |v|^2/2 for time t:
/// per coordinate a rotation with angular frequency 1/sigma_i.
PhaseState exact_gaussian_flow(const GaussianTarget& target, double t, const PhaseState& z);

}  // namespace snippet_smc
