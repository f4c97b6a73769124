#include "snippet_smc/annealed_family.hpp"

#include <limits>

namespace snippet_smc {

void TemperedFamily::pi_bundle(double gamma, const Vector& x, double& log_pi_out,
                               Vector& grad_out) const {
  if (!x.allFinite()) {
    log_pi_out = neg_inf;
    grad_out = Vector::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
    return;
  }
  const double lp = target_->log_prior(x);
  Vector grad = target_->grad_log_prior(x);
  double ll = 0.0;
  if (gamma != 0.0) {
    Vector grad_ll;
    target_->likelihood_bundle(x, ll, grad_ll);
    grad += gamma * grad_ll;
  }
  const double total = gamma * ll + lp;
  log_pi_out = std::isfinite(total) ? total : neg_inf;
  grad_out = std::move(grad);
}

}  // namespace snippet_smc
