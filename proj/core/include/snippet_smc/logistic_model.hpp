#pragma once

#include <string>

#include "snippet_smc/tempered_target.hpp"

namespace snippet_smc {

// Bayesian logistic regression with labels y_i in {-1, +1}:
//   L(x) = prod_i (1 + exp(-y_i <xi_i, x>))^{-1},
// independent zero-mean Gaussian prior with per-coordinate scales.
class LogisticRegressionTarget final : public TemperedTarget {
 public:
  /// design: n_obs x d (intercept column already prepended when wanted),
  /// labels in {-1, +1}, prior_scales strictly positive, length d.
  LogisticRegressionTarget(Matrix design, Vector labels, Vector prior_scales);

  Eigen::Index dimension() const override { return design_.cols(); }
  Eigen::Index n_observations() const { return design_.rows(); }

  double log_prior(const Vector& x) const override;
  double log_likelihood(const Vector& x) const override;
  Vector grad_log_prior(const Vector& x) const override;
  Vector grad_log_likelihood(const Vector& x) const override;
  void likelihood_bundle(const Vector& x, double& loglik, Vector& grad_loglik) const override;
  Vector sample_prior(RandomStream& rng) const override;

  const Matrix& design() const { return design_; }
  const Vector& labels() const { return labels_; }
  const Vector& prior_scales() const { return prior_scales_; }

 private:
  Matrix design_;        // rows pre-multiplied by nothing; y folded in at eval
  Vector labels_;
  Vector prior_scales_;
  double log_prior_norm_;
};

/// Reads the Sonar CSV (rows of 60 comma-separated reals followed by a class
/// token "R" or "M"), prepends an intercept column of ones, maps R -> +1 and
/// M -> -1, and sets prior scales to 20 for the intercept and 5 elsewhere.
/// Malformed input raises std::runtime_error naming the offending line.
LogisticRegressionTarget load_sonar(const std::string& path);

}  // namespace snippet_smc
