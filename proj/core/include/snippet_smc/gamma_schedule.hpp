#pragma once

#include <functional>
#include <span>

namespace snippet_smc {

/// Largest gamma in (gamma_n, 1] keeping the seed-level ESS above
/// alpha * N, located by bisection to absolute tolerance `tol`. The
/// chi statistic is N sum(w^2) / (sum w)^2 with per-seed log weights
/// log_weight_at(gamma, i); ESS = N / chi. Returns 1 when even gamma = 1
/// satisfies the constraint or when the weights carry no information.
double next_gamma_generic(std::size_t n_particles,
                          const std::function<double(double, std::size_t)>& log_weight_at,
                          double gamma_n, double ess_target_ratio, double tol);

/// Tempered-path specialization: weights w_i = exp((gamma - gamma_n) * loglik_i).
/// Degenerate inputs (fewer than two distinct loglik values) finish the
/// schedule by returning 1.
double next_gamma(std::span<const double> loglik, double gamma_n, double ess_target_ratio,
                  double tol = 1e-8);

}  // namespace snippet_smc
