#pragma once

#include <memory>

#include "snippet_smc/phase_state.hpp"
#include "snippet_smc/random_stream.hpp"
#include "snippet_smc/tempered_target.hpp"

namespace snippet_smc {

// The SMC engine anneals along a one-parameter family of unnormalized
// position densities pi(x; gamma), gamma in [0, 1]. For tempered Bayesian
// targets the family is L^gamma * eta; for filamentary targets gamma indexes
// a shrinking constraint tolerance. Incremental weights between two gammas
// are computed from a cached per-particle statistic so the ESS bisection in
// the schedule adaptation costs O(1) per probe.
class AnnealedFamily {
 public:
  virtual ~AnnealedFamily() = default;

  virtual Eigen::Index dimension() const = 0;

  virtual double log_pi(double gamma, const Vector& x) const = 0;

  /// Density and gradient at gamma in one pass (leapfrog chains consume both).
  virtual void pi_bundle(double gamma, const Vector& x, double& log_pi_out,
                         Vector& grad_out) const = 0;

  /// Per-particle statistic from which schedule increments are computed.
  virtual double schedule_statistic(const Vector& x) const = 0;

  /// log pi(x; g1) - log pi(x; g0) given the cached statistic.
  virtual double log_incremental(double g0, double g1, double stat) const = 0;

  /// log pi(x; gamma) given the cached statistic; avoids re-evaluating the
  /// expensive likelihood part at seed particles.
  virtual double log_pi_given_stat(double gamma, const Vector& x, double stat) const = 0;

  /// Draw from the gamma = 0 distribution.
  virtual Vector sample_initial(RandomStream& rng) const = 0;
};

/// Standard tempering path over a TemperedTarget.
class TemperedFamily final : public AnnealedFamily {
 public:
  explicit TemperedFamily(std::shared_ptr<const TemperedTarget> target)
      : target_(std::move(target)) {}

  Eigen::Index dimension() const override { return target_->dimension(); }

  double log_pi(double gamma, const Vector& x) const override {
    if (!x.allFinite()) return neg_inf;
    const double lp = target_->log_prior(x);
    if (!std::isfinite(lp)) return neg_inf;
    const double ll = (gamma != 0.0) ? target_->log_likelihood(x) : 0.0;
    if (std::isnan(ll) || ll == neg_inf) return neg_inf;
    const double total = gamma * ll + lp;
    return std::isfinite(total) ? total : neg_inf;
  }

  void pi_bundle(double gamma, const Vector& x, double& log_pi_out,
                 Vector& grad_out) const override;

  double schedule_statistic(const Vector& x) const override {
    return target_->log_likelihood(x);
  }

  double log_incremental(double g0, double g1, double stat) const override {
    if (std::isnan(stat)) return neg_inf;
    if (stat == neg_inf) return (g1 > g0) ? neg_inf : 0.0;
    return (g1 - g0) * stat;
  }

  double log_pi_given_stat(double gamma, const Vector& x, double stat) const override {
    if (std::isnan(stat)) return neg_inf;
    const double lp = target_->log_prior(x);
    if (!std::isfinite(lp)) return neg_inf;
    if (gamma == 0.0) return lp;
    if (stat == neg_inf) return neg_inf;
    const double total = gamma * stat + lp;
    return std::isfinite(total) ? total : neg_inf;
  }

  Vector sample_initial(RandomStream& rng) const override {
    return target_->sample_prior(rng);
  }

  const TemperedTarget& target() const { return *target_; }

 private:
  std::shared_ptr<const TemperedTarget> target_;
};

}  // namespace snippet_smc
