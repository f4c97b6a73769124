#pragma once

#include <functional>
#include <span>

#include "snippet_smc/estimators.hpp"
#include "snippet_smc/random_stream.hpp"
#include "snippet_smc/snippet.hpp"

namespace snippet_smc {

// Brute-force certifications of the identities the estimators rely on.
// These are deliberately independent of the estimator code paths they check.

/// Draw one sample from the snippet mixture: z ~ mu via `sample_mu`,
/// k ~ U{0..T}, return psi^{-k}(z) computed through the velocity flip
/// (psi^{-1} = sigma o psi o sigma).
PhaseState sample_mu_bar(const IntegratorStep& step, double epsilon, int T,
                         const std::function<PhaseState(RandomStream&)>& sample_mu,
                         RandomStream& rng);

/// Exhaustively enumerates every N-tuple of (snippet, state) resampling
/// outcomes with its exact probability, forms the expectation of the folded
/// estimator over those outcomes and returns the absolute discrepancy from
/// the unfolded estimator computed on the same snippets. Instances larger
/// than 64 candidate states (or over 10^8 tuples) are refused.
double rao_blackwell_oracle(std::span<const Snippet> snippets, const ScalarObservable& f);

/// Two-sided variant: the unfolded estimator and resampling law come from
/// `unfolded`, the within-snippet averages from `folded`. With identical
/// inputs this is rao_blackwell_oracle; feeding a corrupted copy on one side
/// measures the check's power to detect an inconsistent implementation.
double rao_blackwell_discrepancy(std::span<const Snippet> unfolded,
                                 std::span<const Snippet> folded,
                                 const ScalarObservable& f);

struct VarianceDecomposition {
  double term_between = 0.0;    // var of within-snippet conditional means
  double term_within = 0.0;     // mean of within-snippet conditional variances
  double var_direct = 0.0;      // var_mu(f) from direct mu samples
  double identity_gap = 0.0;    // term_between + term_within - var_direct
  double identity_se = 0.0;     // batch SE of the gap
  double reduction_gap = 0.0;   // term_between - var_direct (should be < 0)
  double reduction_se = 0.0;
};

/// Monte Carlo check of the variance decomposition
///   var_mu(f) = var(E[fbar | Z]) + E[var(fbar | Z)], Z ~ mu_bar,
/// using exact mixture samples from sample_mu_bar. log_mu supplies the
/// (unnormalized) phase-space density used for the within-snippet weights.
/// Standard errors come from `batches` equal batches.
VarianceDecomposition variance_decomposition_check(
    const IntegratorStep& step, double epsilon, int T,
    const std::function<PhaseState(RandomStream&)>& sample_mu,
    const std::function<double(const PhaseState&)>& log_mu, const ScalarObservable& f,
    std::size_t n_samples, RandomStream& rng, std::size_t batches = 100);

}  // namespace snippet_smc
