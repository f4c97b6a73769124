#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "snippet_smc/annealed_family.hpp"
#include "snippet_smc/epsilon_adaptation.hpp"
#include "snippet_smc/integrator.hpp"
#include "snippet_smc/resampling.hpp"
#include "snippet_smc/snippet.hpp"
#include "snippet_smc/tempered_target.hpp"

namespace snippet_smc {

/// N seed particles with their stepsizes and integrator labels, plus the
/// current inverse temperature and the running evidence accumulator.
struct ParticleCloud {
  std::vector<PhaseState> states;
  std::vector<double> epsilons;
  std::vector<int> labels;
  std::vector<double> stats;  // cached schedule statistics (loglik or |ell|)
  double gamma = 0.0;
  int iteration = 0;
  double log_z = 0.0;

  std::size_t size() const { return states.size(); }
};

struct IterationRecord {
  int iteration = 0;
  double gamma = 0.0;
  double theta = 0.0;     // epsilon-distribution mean (the fixed stepsize when not adapting)
  int T = 0;
  double tau = 0.0;       // selected effective integration time (0 if not adapted)
  double log_z_increment = 0.0;
  double log_z_cumulative = 0.0;
  double ess_unfolded = 0.0;
  double ess_seed = 0.0;
  double median_epsilon = 0.0;
  double min_log_w = 0.0;
  double max_log_w = 0.0;
  double wall_ms = 0.0;
};

struct EpsilonSpec {
  bool adaptive = false;
  std::vector<double> fixed = {0.1};  // one entry, or one per integrator label
  double theta0 = 0.1;
  double skewness = 3.0;
};

/// Builds the one-step map for a label at inverse temperature gamma.
/// Gamma-independent integrators (THUG, SNUG, exact flow) may ignore the
/// argument and return a shared instance.
using IntegratorFactory =
    std::function<std::shared_ptr<const IntegratorStep>(double gamma)>;

struct EngineConfig {
  int n_particles = 500;
  int T = 30;
  bool adapt_tau = false;
  int T_max = 100;
  int tau_bins = 50;
  double ess_target = 0.8;
  double gamma0 = 0.0;
  double min_gamma_step = 1e-8;
  int max_iterations = 1000;
  EpsilonSpec epsilon;
  std::vector<double> mixture_proportions = {1.0};
  std::uint64_t seed = 0;
  ResamplingKind resampling = ResamplingKind::multinomial;
};

struct RunResult {
  ParticleCloud cloud;
  std::vector<IterationRecord> records;
  double log_z = 0.0;
  Vector posterior_mean;
  double posterior_mean_ess = 0.0;
  double theta_final = 0.0;
  std::uint64_t gradient_evaluations = 0;
};

// Unfolded integrator-snippet SMC: every iteration grows a T-step snippet
// from each seed, resamples N seeds from all N(T+1) weighted states, then
// refreshes velocities (and stepsizes and integrator labels where enabled).
// All randomness flows through per-iteration / per-particle substreams, so
// traces are reproducible and independent of the worker thread count.
class SnippetSmcEngine {
 public:
  SnippetSmcEngine(std::shared_ptr<const AnnealedFamily> family,
                   std::vector<IntegratorFactory> integrators, EngineConfig config);

  RunResult run();

  /// Run with an explicit root stream (replications hand one substream per
  /// run); run() is equivalent to run(RandomStream(config.seed)).
  RunResult run(RandomStream root);

  /// One tempering move cloud.gamma -> gamma_next with T integration steps.
  IterationRecord run_iteration(ParticleCloud& cloud, double gamma_next, int T,
                                RandomStream& iter_stream);

  ParticleCloud initialize(RandomStream& init_stream) const;

  const std::vector<Snippet>& last_snippets() const { return snippets_; }
  double theta() const { return theta_; }
  std::uint64_t gradient_evaluations() const { return grad_evals_; }

 private:
  double draw_epsilon(int label, RandomStream& rng) const;

  std::shared_ptr<const AnnealedFamily> family_;
  std::vector<IntegratorFactory> integrators_;
  EngineConfig config_;
  VelocityLaw velocity_;
  double theta_ = 0.0;
  std::uint64_t grad_evals_ = 0;
  std::vector<Snippet> snippets_;
  double tau_last_ = 0.0;
  int T_next_ = 1;
};

/// Leapfrog bound to the family's position density at a fixed gamma.
std::shared_ptr<const IntegratorStep> make_leapfrog(
    std::shared_ptr<const AnnealedFamily> family, double gamma);

/// Factory wrapper for gamma-independent integrator instances.
IntegratorFactory constant_integrator(std::shared_ptr<const IntegratorStep> step);

/// Factory producing gamma-bound leapfrog steps.
IntegratorFactory leapfrog_integrator(std::shared_ptr<const AnnealedFamily> family);

}  // namespace snippet_smc
