#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "snippet_smc/filamentary_model.hpp"
#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/phase_state.hpp"
#include "snippet_smc/random_stream.hpp"

namespace snippet_smc {

/// Scratch carried along one trajectory. Chained integrators cache the
/// target gradient (and log density when available) at the current state so
/// a T-step snippet costs T+1 gradient evaluations, not 2T.
struct StepContext {
  bool has_grad = false;
  Vector grad;             // grad log pi at the current position
  bool has_log_pi = false;
  double log_pi = 0.0;     // log pi at the current position
  std::uint64_t grad_evals = 0;

  void reset() {
    has_grad = false;
    has_log_pi = false;
  }
};

/// Position-space target hooks an integrator needs. log_density_and_grad is
/// fused because value and gradient usually share their costly terms.
struct PositionTarget {
  std::function<void(const Vector& x, double& log_pi, Vector& grad)> log_density_and_grad;
};

/// Deterministic one-step map psi_eps with velocity-flip reversibility
/// sigma o psi o sigma o psi = id.
class IntegratorStep {
 public:
  virtual ~IntegratorStep() = default;

  /// Prepare cached quantities at the trajectory seed (a no-op for maps
  /// that do not chain gradients).
  virtual void prime(const PhaseState& z, StepContext& ctx) const { (void)z, (void)ctx; }

  virtual PhaseState step(double epsilon, const PhaseState& z, StepContext& ctx) const = 0;

  virtual bool volume_preserving() const { return true; }
};

/// Leapfrog for H(x, v) = -log pi(x) + |v|^2/2:
///   v half-kick, x drift, v half-kick; one new gradient per chained step.
class LeapfrogStep final : public IntegratorStep {
 public:
  explicit LeapfrogStep(PositionTarget target) : target_(std::move(target)) {}

  void prime(const PhaseState& z, StepContext& ctx) const override;
  PhaseState step(double epsilon, const PhaseState& z, StepContext& ctx) const override;

 private:
  PositionTarget target_;
};

/// THUG bounce step psi_A o b o psi_A: drift eps, reflect the velocity in
/// the constraint field at the midpoint, drift eps. Hugs the level set of
/// the constraint through x.
class ThugStep final : public IntegratorStep {
 public:
  explicit ThugStep(std::shared_ptr<const FilamentaryTarget> constraint)
      : constraint_(std::move(constraint)) {}

  PhaseState step(double epsilon, const PhaseState& z, StepContext& ctx) const override;

 private:
  std::shared_ptr<const FilamentaryTarget> constraint_;
};

/// SNUG step psi_A o (-b) o psi_A: as THUG but with the negated reflection,
/// which hops across constraint contours along the gradient field.
class SnugStep final : public IntegratorStep {
 public:
  explicit SnugStep(std::shared_ptr<const FilamentaryTarget> constraint)
      : constraint_(std::move(constraint)) {}

  PhaseState step(double epsilon, const PhaseState& z, StepContext& ctx) const override;

 private:
  std::shared_ptr<const FilamentaryTarget> constraint_;
};

/// Exact Hamilton flow of a diagonal Gaussian for time eps per step; used as
/// a zero-discretization-error oracle.
class ExactGaussianFlowStep final : public IntegratorStep {
 public:
  explicit ExactGaussianFlowStep(std::shared_ptr<const GaussianTarget> target)
      : target_(std::move(target)) {}

  PhaseState step(double epsilon, const PhaseState& z, StepContext& ctx) const override;

 private:
  std::shared_ptr<const GaussianTarget> target_;
};

/// Categorical draw of an integrator label from mixture proportions summing
/// to one; labels are redrawn independently at refresh time.
int mixture_select(std::span<const double> proportions, RandomStream& rng);

}  // namespace snippet_smc
