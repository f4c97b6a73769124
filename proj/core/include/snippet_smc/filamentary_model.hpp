#pragma once

#include "snippet_smc/annealed_family.hpp"
#include "snippet_smc/phase_state.hpp"
#include "snippet_smc/random_stream.hpp"

namespace snippet_smc {

// Standard normal base density restricted to a shell around the ellipsoid
// ell(x) = x' Sigma^{-1} x - c = 0 with diagonal Sigma:
//   pi_tol(x) propto 1{|ell(x)| <= tol} N(x; 0, Id).
// THUG/SNUG bounce in the unit field n(x) = grad ell(x)/|grad ell(x)|.
class FilamentaryTarget {
 public:
  FilamentaryTarget(Vector sigma_diag, double c);

  Eigen::Index dimension() const { return inv_sigma_.size(); }

  double constraint(const Vector& x) const;         // ell(x)
  Vector constraint_gradient(const Vector& x) const;  // grad ell(x) = 2 Sigma^{-1} x

  /// log pi_tol(x); -inf outside the shell, Gaussian log density inside
  /// (the 1/tol^m normalization is dropped: constant at fixed tol).
  double log_density(double tol, const Vector& x) const;

  Vector sample_base(RandomStream& rng) const;  // N(0, Id)

 private:
  Vector inv_sigma_;  // diagonal of Sigma^{-1}
  double c_;
};

/// Annealing family over a geometric tolerance schedule:
/// tol(gamma) = tol_initial^(1-gamma) * tol_final^gamma. The schedule
/// statistic is |ell(x)|, so ESS bisection over gamma reproduces the usual
/// adaptive tolerance-shrinking scheme.
class FilamentaryFamily final : public AnnealedFamily {
 public:
  FilamentaryFamily(std::shared_ptr<const FilamentaryTarget> target, double tol_initial,
                    double tol_final);

  Eigen::Index dimension() const override { return target_->dimension(); }
  double log_pi(double gamma, const Vector& x) const override;
  void pi_bundle(double gamma, const Vector& x, double& log_pi_out,
                 Vector& grad_out) const override;
  double schedule_statistic(const Vector& x) const override;
  double log_incremental(double g0, double g1, double stat) const override;
  double log_pi_given_stat(double gamma, const Vector& x, double stat) const override;
  Vector sample_initial(RandomStream& rng) const override;

  double tolerance(double gamma) const;
  const FilamentaryTarget& target() const { return *target_; }

 private:
  std::shared_ptr<const FilamentaryTarget> target_;
  double log_tol_initial_;
  double log_tol_final_;
};

}  // namespace snippet_smc
