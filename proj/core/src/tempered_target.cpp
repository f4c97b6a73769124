#include "snippet_smc/tempered_target.hpp"

#include <limits>
#include <stdexcept>

namespace snippet_smc {

double log_mu(const TemperedTarget& target, const VelocityLaw& vel, double gamma,
              const PhaseState& z) {
  if (z.x.size() != target.dimension() || z.v.size() != vel.dimension())
    throw std::invalid_argument("log_mu: dimension mismatch");
  if (!z.is_finite()) return neg_inf;
  const double lp = target.log_prior(z.x);
  if (!std::isfinite(lp) || lp == neg_inf) return neg_inf;
  const double lv = vel.log_density(z.v);
  if (!std::isfinite(lv)) return neg_inf;
  double ll = 0.0;
  if (gamma != 0.0) {
    ll = target.log_likelihood(z.x);
    if (std::isnan(ll)) return neg_inf;
    if (ll == neg_inf) return neg_inf;
  }
  const double total = gamma * ll + lp + lv;
  return std::isfinite(total) ? total : neg_inf;
}

Vector grad_log_mu_x(const TemperedTarget& target, double gamma, const Vector& x) {
  if (x.size() != target.dimension())
    throw std::invalid_argument("grad_log_mu_x: dimension mismatch");
  if (!x.allFinite())
    return Vector::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
  Vector g = target.grad_log_prior(x);
  if (gamma != 0.0) g += gamma * target.grad_log_likelihood(x);
  return g;
}

}  // namespace snippet_smc
