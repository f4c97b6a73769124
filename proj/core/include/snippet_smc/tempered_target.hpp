#pragma once

#include <cmath>

#include "snippet_smc/math_util.hpp"
#include "snippet_smc/phase_state.hpp"
#include "snippet_smc/random_stream.hpp"

namespace snippet_smc {

/// A tempering family pi(dx; gamma) proportional to L^gamma(x) eta(dx):
/// log pi(x; gamma) = gamma * log_likelihood(x) + log_prior(x), up to a
/// gamma-dependent constant.
class TemperedTarget {
 public:
  virtual ~TemperedTarget() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double log_prior(const Vector& x) const = 0;
  virtual double log_likelihood(const Vector& x) const = 0;
  virtual Vector grad_log_prior(const Vector& x) const = 0;
  virtual Vector grad_log_likelihood(const Vector& x) const = 0;

  /// Draw from the prior eta (the gamma = 0 distribution).
  virtual Vector sample_prior(RandomStream& rng) const = 0;

  /// Likelihood value and gradient in one pass. Models whose likelihood and
  /// gradient share expensive terms override this; the default just calls
  /// both virtuals.
  virtual void likelihood_bundle(const Vector& x, double& loglik, Vector& grad_loglik) const {
    loglik = log_likelihood(x);
    grad_loglik = grad_log_likelihood(x);
  }
};

/// Velocity distribution; default standard normal on R^d.
class VelocityLaw {
 public:
  explicit VelocityLaw(Eigen::Index d) : d_(d) {}

  Eigen::Index dimension() const { return d_; }

  double log_density(const Vector& v) const {
    if (!v.allFinite()) return neg_inf;
    return -0.5 * v.squaredNorm() - 0.5 * static_cast<double>(d_) * std::log(2.0 * std::numbers::pi);
  }

  Vector sample(RandomStream& rng) const {
    Vector v(d_);
    for (Eigen::Index i = 0; i < d_; ++i) v[i] = rng.normal();
    return v;
  }

 private:
  Eigen::Index d_;
};

/// log mu(z; gamma) = gamma * loglik(x) + logprior(x) + log varpi(v).
/// Non-finite intermediates collapse to -inf so that divergent states carry
/// zero resampling weight instead of poisoning downstream arithmetic.
double log_mu(const TemperedTarget& target, const VelocityLaw& vel, double gamma,
              const PhaseState& z);

/// Position-space gradient of log mu at temperature gamma:
/// gamma * grad_loglik(x) + grad_logprior(x). Non-finite input yields NaN
/// entries; callers are expected to detect them (see build_snippet).
Vector grad_log_mu_x(const TemperedTarget& target, double gamma, const Vector& x);

}  // namespace snippet_smc
