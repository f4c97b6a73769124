#include "snippet_smc/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

void LeapfrogStep::prime(const PhaseState& z, StepContext& ctx) const {
  target_.log_density_and_grad(z.x, ctx.log_pi, ctx.grad);
  ctx.has_grad = true;
  ctx.has_log_pi = true;
  ++ctx.grad_evals;
}

PhaseState LeapfrogStep::step(double epsilon, const PhaseState& z, StepContext& ctx) const {
  if (!ctx.has_grad) prime(z, ctx);
  PhaseState out;
  out.v = z.v + 0.5 * epsilon * ctx.grad;
  out.x = z.x + epsilon * out.v;
  target_.log_density_and_grad(out.x, ctx.log_pi, ctx.grad);
  ctx.has_grad = true;
  ctx.has_log_pi = true;
  ++ctx.grad_evals;
  out.v += 0.5 * epsilon * ctx.grad;
  return out;
}

namespace {

// Shared drift-bounce-drift composition; `negate` distinguishes SNUG.
PhaseState hug_step(const FilamentaryTarget& constraint, double epsilon, const PhaseState& z,
                    bool negate) {
  const Vector x_mid = z.x + epsilon * z.v;
  Vector g = constraint.constraint_gradient(x_mid);
  const double gn = g.norm();
  Vector v_new;
  if (gn == 0.0 || !std::isfinite(gn)) {
    v_new = z.v;  // degenerate field: reflection collapses to the identity
  } else {
    g /= gn;
    v_new = z.v - 2.0 * z.v.dot(g) * g;
    if (negate) v_new = -v_new;
  }
  return {x_mid + epsilon * v_new, v_new};
}

}  // namespace

PhaseState ThugStep::step(double epsilon, const PhaseState& z, StepContext& ctx) const {
  (void)ctx;
  return hug_step(*constraint_, epsilon, z, /*negate=*/false);
}

PhaseState SnugStep::step(double epsilon, const PhaseState& z, StepContext& ctx) const {
  (void)ctx;
  return hug_step(*constraint_, epsilon, z, /*negate=*/true);
}

PhaseState ExactGaussianFlowStep::step(double epsilon, const PhaseState& z,
                                       StepContext& ctx) const {
  (void)ctx;
  return exact_gaussian_flow(*target_, epsilon, z);
}

int mixture_select(std::span<const double> proportions, RandomStream& rng) {
  double total = 0.0;
  for (double p : proportions) {
    if (p < 0.0 || !std::isfinite(p))
      throw std::invalid_argument("mixture_select: proportions must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mixture_select: proportions must sum to one");
  return static_cast<int>(rng.categorical(proportions));
}

}  // namespace snippet_smc
