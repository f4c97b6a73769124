#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "snippet_smc/integrator.hpp"
#include "snippet_smc/phase_state.hpp"

namespace snippet_smc {

/// One integrator snippet: the T+1 states psi^0(z) .. psi^T(z) with cached
/// log densities and unnormalized log weights
///   log_w[k] = log mu_next(z_k) - log mu_prev(z_0),
/// where -inf marks states outside support or past a divergence.
struct Snippet {
  std::vector<PhaseState> states;
  Eigen::VectorXd log_mu_next;    // log mu_n(z_k), k = 0..T
  double log_mu_prev_seed = 0.0;  // log mu_{n-1}(z_0)
  Eigen::VectorXd log_w;
  double epsilon = 0.0;
  int label = 0;
  std::uint64_t grad_evals = 0;

  int T() const { return static_cast<int>(states.size()) - 1; }
};

/// Density accessors for snippet construction. log_mu_next may reuse the
/// integrator's cached position density (ctx.log_pi) when present.
struct SnippetDensities {
  std::function<double(const PhaseState&, const StepContext&)> log_mu_next;
  std::function<double(const PhaseState&)> log_mu_prev;
};

/// Grows the snippet z, psi(z), ..., psi^T(z). The seed must lie in the
/// support of mu_prev (importance-sampling support condition); violating
/// that is a hard error. If integration produces a non-finite state the
/// remaining slots are padded with the last finite state and weight -inf.
Snippet build_snippet(const IntegratorStep& step, double epsilon, int T, const PhaseState& z0,
                      const SnippetDensities& densities);

}  // namespace snippet_smc
