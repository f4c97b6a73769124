#include "snippet_smc/gamma_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

double next_gamma_generic(std::size_t n_particles,
                          const std::function<double(double, std::size_t)>& log_weight_at,
                          double gamma_n, double ess_target_ratio, double tol) {
  if (!(ess_target_ratio > 0.0 && ess_target_ratio < 1.0))
    throw std::invalid_argument("next_gamma: ess target ratio must lie in (0, 1)");
  if (!(gamma_n >= 0.0 && gamma_n < 1.0))
    throw std::invalid_argument("next_gamma: gamma_n must lie in [0, 1)");
  const double target = ess_target_ratio * static_cast<double>(n_particles);

  std::vector<double> logw(n_particles);
  const auto ess_at = [&](double gamma) {
    for (std::size_t i = 0; i < n_particles; ++i) logw[i] = log_weight_at(gamma, i);
    return ess_from_log_weights(logw);
  };

  if (ess_at(1.0) >= target) return 1.0;
  double lo = gamma_n, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (ess_at(mid) >= target) lo = mid;
    else hi = mid;
  }
  return lo;
}

double next_gamma(std::span<const double> loglik, double gamma_n, double ess_target_ratio,
                  double tol) {
  if (loglik.size() < 2) return 1.0;
  // Max-subtraction keeps exp((gamma - gamma_n) * loglik) representable.
  double max_ll = neg_inf;
  bool distinct = false;
  for (double ll : loglik) {
    if (std::isnan(ll)) continue;
    if (!std::isnan(loglik[0]) && ll != loglik[0]) distinct = true;
    max_ll = std::max(max_ll, ll);
  }
  if (!distinct || !std::isfinite(max_ll)) return 1.0;
  return next_gamma_generic(
      loglik.size(),
      [&](double gamma, std::size_t i) {
        const double ll = loglik[i];
        if (std::isnan(ll)) return neg_inf;
        if (ll == neg_inf) return (gamma > gamma_n) ? neg_inf : 0.0;
        return (gamma - gamma_n) * (ll - max_ll);
      },
      gamma_n, ess_target_ratio, tol);
}

}  // namespace snippet_smc
