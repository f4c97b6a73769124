#pragma once

#include <functional>
#include <span>

#include "snippet_smc/snippet.hpp"

namespace snippet_smc {

struct WeightedEstimate {
  Vector value;
  bool self_normalized = true;
  double ess = 0.0;
  std::size_t contributing_states = 0;
};

using Observable = std::function<Vector(const PhaseState&)>;
using ScalarObservable = std::function<double(const PhaseState&)>;

inline Observable position_observable() {
  return [](const PhaseState& z) { return z.x; };
}

/// Unfolded estimator: weights of all N(T+1) snippet states normalized
/// jointly. Throws std::domain_error when every weight is -inf.
WeightedEstimate estimate_unfolded(std::span<const Snippet> snippets, const Observable& f);

/// Folded estimator (1/N) sum_i sum_k q_{i,k} f(z_{i,k}) with weights
/// normalized within each snippet; a snippet whose weights are all -inf has
/// no defined within-snippet distribution and raises std::domain_error
/// naming its index.
WeightedEstimate estimate_folded(std::span<const Snippet> snippets, const Observable& f);

/// Self-normalized ESS (sum w)^2 / sum w^2 over all N(T+1) state weights;
/// equals N(T+1) iff the weights are constant.
double unfolded_ess(std::span<const Snippet> snippets);

/// Bound-derived ESS for folded estimators (secondary diagnostic):
/// (N/2) E[S]^2 / (2 E[S^2] - E[S]^2) with S the per-snippet sum of target
/// densities along the snippet.
double folded_ess_bound(std::span<const Snippet> snippets);

/// Expected squared jump distance computed exactly as displayed: for each
/// snippet, sum over ordered state pairs k < l of
/// (f(z_l) Wbar_l - f(z_k) Wbar_k)^2 with within-snippet normalized weights.
double esjd(std::span<const Snippet> snippets, const ScalarObservable& f);

/// Empirical relative-efficiency diagnostics; moment ratios of the per-state
/// weights, nothing more.
struct RelativeEfficiency {
  double re0 = 0.0;  // vs perfect iid Monte Carlo at matched budget
  double re1 = 0.0;  // vs independent-states pushforward sampling
  double re2 = 0.0;  // vs using the two snippet endpoints only
};

RelativeEfficiency relative_efficiency(std::span<const Snippet> snippets);

}  // namespace snippet_smc
