#include "snippet_smc/snippet.hpp"

#include <cmath>
#include <stdexcept>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

Snippet build_snippet(const IntegratorStep& step, double epsilon, int T, const PhaseState& z0,
                      const SnippetDensities& densities) {
  if (T < 1) throw std::invalid_argument("build_snippet: T must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_snippet: epsilon must be positive");
  if (!z0.is_finite()) throw std::invalid_argument("build_snippet: non-finite seed");

  const double lw_prev = densities.log_mu_prev(z0);
  if (!(lw_prev > neg_inf) || std::isnan(lw_prev))
    throw std::domain_error("build_snippet: seed outside the support of mu_prev");

  Snippet s;
  s.epsilon = epsilon;
  s.log_mu_prev_seed = lw_prev;
  s.states.resize(static_cast<size_t>(T) + 1);
  s.log_mu_next.resize(T + 1);

  StepContext ctx;
  step.prime(z0, ctx);
  s.states[0] = z0;
  s.log_mu_next[0] = densities.log_mu_next(z0, ctx);

  bool diverged = false;
  for (int k = 1; k <= T; ++k) {
    if (!diverged) {
      PhaseState next = step.step(epsilon, s.states[static_cast<size_t>(k) - 1], ctx);
      if (!next.is_finite()) {
        diverged = true;
      } else {
        s.states[static_cast<size_t>(k)] = std::move(next);
        double lm = densities.log_mu_next(s.states[static_cast<size_t>(k)], ctx);
        if (std::isnan(lm)) lm = neg_inf;
        s.log_mu_next[k] = lm;
        continue;
      }
    }
    // Past a divergence: pad with the last finite state at zero weight.
    s.states[static_cast<size_t>(k)] = s.states[static_cast<size_t>(k) - 1];
    s.log_mu_next[k] = neg_inf;
  }

  s.log_w = s.log_mu_next.array() - lw_prev;
  for (int k = 0; k <= T; ++k)
    if (std::isnan(s.log_w[k])) s.log_w[k] = neg_inf;
  s.grad_evals = ctx.grad_evals;
  return s;
}

}  // namespace snippet_smc
