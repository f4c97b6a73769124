#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "snippet_smc/annealed_family.hpp"
#include "snippet_smc/engine.hpp"
#include "snippet_smc/phase_state.hpp"
#include "snippet_smc/random_stream.hpp"

namespace snippet_smc {

/// A chain snippet z_0..z_T grown by a Markov kernel, with cached log
/// densities. The densities are taken with respect to the dominating
/// measure upsilon the kernel is reversible for: Lebesgue for deterministic
/// volume-preserving maps and uncorrected random walks, the kernel's target
/// for Metropolis-Hastings chains. The weight formula below is the same in
/// either convention.
struct MarkovSnippet {
  std::vector<Vector> states;
  Eigen::VectorXd log_mu_next;    // d mu_n / d upsilon at z_k
  double log_mu_prev_seed = 0.0;  // d mu_{n-1} / d upsilon at z_0
};

struct MarkovSnippetWeights {
  Eigen::VectorXd log_w;  // log_w[k] = log_mu_next[k] - log_mu_prev_seed
  double log_w_bar = 0.0;  // log of the mean of exp(log_w) over k
};

/// Per-state and aggregate snippet weights from the cached densities. The
/// seed must lie in the support of mu_{n-1}.
MarkovSnippetWeights markov_snippet_weights(const MarkovSnippet& snippet);

/// One random-walk Metropolis-Hastings step with proposal covariance
/// scale^2 * C given through its Cholesky factor L (C = L L'). Returns the
/// new position and whether the proposal was accepted. A zero proposal
/// scale always accepts the (identical) proposal.
struct RwmhResult {
  Vector x;
  bool accepted = false;
};

RwmhResult rwmh_step(const std::function<double(const Vector&)>& log_density,
                     const Matrix& proposal_chol, const Vector& x, double current_log_density,
                     RandomStream& rng);

/// Cholesky factor of the standard adaptive RWMH proposal covariance
/// 2.38^2 Sigma_hat / d, with Sigma_hat the empirical covariance of the
/// supplied positions, diagonally loaded with 1e-9 trace/d for safety.
/// Throws when the loaded matrix is still not positive definite.
Matrix adaptive_proposal_cholesky(const std::vector<Vector>& positions);

struct MarkovSnippetConfig {
  int n_particles = 100;
  int chain_length = 99;  // T: number of mutation steps per snippet
  double ess_target = 0.8;
  double gamma0 = 0.0;
  double min_gamma_step = 1e-8;
  int max_iterations = 1000;
  std::uint64_t seed = 0;
};

struct MarkovSnippetRunResult {
  double log_z = 0.0;
  Vector posterior_mean;
  std::vector<IterationRecord> records;
  std::vector<Vector> final_positions;
};

// Waste-free style baseline: snippets are RWMH chains at the current
// temperature, every chain state is reweighted to the next temperature and
// the next seeds are drawn jointly from all N(T+1) weighted states. The
// refresh kernel is the identity (position-only states).
class MarkovSnippetSmc {
 public:
  MarkovSnippetSmc(std::shared_ptr<const AnnealedFamily> family, MarkovSnippetConfig config);

  MarkovSnippetRunResult run();

  /// One tempering move; exposed for tests.
  double run_iteration(std::vector<Vector>& positions, std::vector<double>& stats,
                       double gamma_prev, double gamma_next, RandomStream& iter_stream);

 private:
  std::shared_ptr<const AnnealedFamily> family_;
  MarkovSnippetConfig config_;
  std::vector<MarkovSnippet> snippets_;
  double acceptance_rate_ = 0.0;

 public:
  const std::vector<MarkovSnippet>& last_snippets() const { return snippets_; }
  double last_acceptance_rate() const { return acceptance_rate_; }
};

}  // namespace snippet_smc
