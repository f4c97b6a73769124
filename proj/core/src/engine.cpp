#include "snippet_smc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "snippet_smc/estimators.hpp"
#include "snippet_smc/gamma_schedule.hpp"
#include "snippet_smc/math_util.hpp"
#include "snippet_smc/parallel.hpp"
#include "snippet_smc/tau_adaptation.hpp"

namespace snippet_smc {

namespace {

bool fixed_clock() { return std::getenv("SNIPPET_SMC_FIXED_CLOCK") != nullptr; }

}  // namespace

std::shared_ptr<const IntegratorStep> make_leapfrog(
    std::shared_ptr<const AnnealedFamily> family, double gamma) {
  PositionTarget target;
  target.log_density_and_grad = [family, gamma](const Vector& x, double& log_pi,
                                                Vector& grad) {
    family->pi_bundle(gamma, x, log_pi, grad);
  };
  return std::make_shared<LeapfrogStep>(std::move(target));
}

IntegratorFactory constant_integrator(std::shared_ptr<const IntegratorStep> step) {
  return [step](double) { return step; };
}

IntegratorFactory leapfrog_integrator(std::shared_ptr<const AnnealedFamily> family) {
  return [family](double gamma) { return make_leapfrog(family, gamma); };
}

SnippetSmcEngine::SnippetSmcEngine(std::shared_ptr<const AnnealedFamily> family,
                                   std::vector<IntegratorFactory> integrators,
                                   EngineConfig config)
    : family_(std::move(family)), integrators_(std::move(integrators)),
      config_(std::move(config)), velocity_(family_->dimension()) {
  if (config_.n_particles < 2)
    throw std::invalid_argument("engine: need at least 2 particles");
  if (config_.T < 1) throw std::invalid_argument("engine: T must be >= 1");
  if (config_.T_max < 1) throw std::invalid_argument("engine: T_max must be >= 1");
  if (!(config_.ess_target > 0.0 && config_.ess_target < 1.0))
    throw std::invalid_argument("engine: ess_target must lie in (0, 1)");
  if (!(config_.gamma0 >= 0.0 && config_.gamma0 <= 1.0))
    throw std::invalid_argument("engine: gamma0 must lie in [0, 1]");
  if (integrators_.empty()) throw std::invalid_argument("engine: no integrators");
  if (config_.mixture_proportions.size() != integrators_.size())
    throw std::invalid_argument("engine: mixture proportions do not match integrators");
  if (config_.epsilon.adaptive) {
    if (!(config_.epsilon.theta0 > 0.0) || !(config_.epsilon.skewness > 0.0))
      throw std::invalid_argument("engine: adaptive epsilon needs theta0, skewness > 0");
  } else {
    if (config_.epsilon.fixed.empty())
      throw std::invalid_argument("engine: fixed epsilon spec is empty");
    if (config_.epsilon.fixed.size() != 1 &&
        config_.epsilon.fixed.size() != integrators_.size())
      throw std::invalid_argument("engine: fixed epsilon count must be 1 or one per label");
    for (double e : config_.epsilon.fixed)
      if (!(e > 0.0)) throw std::invalid_argument("engine: stepsizes must be positive");
  }
  if (config_.adapt_tau && integrators_.size() != 1)
    throw std::invalid_argument("engine: tau adaptation requires a single integrator");
  theta_ = config_.epsilon.adaptive ? config_.epsilon.theta0 : config_.epsilon.fixed[0];
  T_next_ = config_.T;
}

double SnippetSmcEngine::draw_epsilon(int label, RandomStream& rng) const {
  if (config_.epsilon.adaptive) {
    const EpsilonDistribution nu{theta_, config_.epsilon.skewness};
    return nu.sample(rng);
  }
  const auto& fixed = config_.epsilon.fixed;
  return fixed.size() == 1 ? fixed[0] : fixed[static_cast<std::size_t>(label)];
}

ParticleCloud SnippetSmcEngine::initialize(RandomStream& init_stream) const {
  ParticleCloud cloud;
  const auto n = static_cast<std::size_t>(config_.n_particles);
  cloud.states.resize(n);
  cloud.epsilons.resize(n);
  cloud.labels.resize(n);
  cloud.stats.resize(n);
  cloud.gamma = config_.gamma0;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream stream = init_stream.substream(i);
    cloud.states[i].x = family_->sample_initial(stream);
    cloud.states[i].v = velocity_.sample(stream);
    cloud.labels[i] = (integrators_.size() > 1)
                          ? mixture_select(config_.mixture_proportions, stream)
                          : 0;
    cloud.epsilons[i] = draw_epsilon(cloud.labels[i], stream);
  }
  // Statistics are RNG-free; fill them in parallel.
  parallel_for(n, [&](std::size_t i) {
    cloud.stats[i] = family_->schedule_statistic(cloud.states[i].x);
  });
  return cloud;
}

IterationRecord SnippetSmcEngine::run_iteration(ParticleCloud& cloud, double gamma_next,
                                                int T, RandomStream& iter_stream) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto n = cloud.size();
  const double gamma_prev = cloud.gamma;
  if (!(gamma_next > gamma_prev && gamma_next <= 1.0))
    throw std::invalid_argument("run_iteration: gamma_next must lie in (gamma, 1]");

  // Per-label one-step maps at the new temperature.
  std::vector<std::shared_ptr<const IntegratorStep>> steps;
  steps.reserve(integrators_.size());
  for (const auto& factory : integrators_) steps.push_back(factory(gamma_next));

  // 1. Grow one snippet per seed; data-parallel, no RNG involved.
  snippets_.assign(n, Snippet{});
  std::vector<double> v_criterion(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    SnippetDensities densities;
    densities.log_mu_next = [&](const PhaseState& z, const StepContext& ctx) {
      const double pos = ctx.has_log_pi ? ctx.log_pi : family_->log_pi(gamma_next, z.x);
      const double vel = velocity_.log_density(z.v);
      const double total = pos + vel;
      return std::isfinite(total) ? total : neg_inf;
    };
    densities.log_mu_prev = [&](const PhaseState& z) {
      const double pos = family_->log_pi_given_stat(gamma_prev, z.x, cloud.stats[i]);
      const double vel = velocity_.log_density(z.v);
      const double total = pos + vel;
      return std::isfinite(total) ? total : neg_inf;
    };
    const int label = cloud.labels[i];
    snippets_[i] = build_snippet(*steps[static_cast<std::size_t>(label)], cloud.epsilons[i],
                                 T, cloud.states[i], densities);
    snippets_[i].label = label;
    v_criterion[i] = snippet_variance_criterion(snippets_[i]);
  });

  // 2. Sequential reductions over the stored snippets.
  const std::size_t total_states = n * static_cast<std::size_t>(T + 1);
  std::vector<double> flat_log_w;
  flat_log_w.reserve(total_states);
  std::vector<double> seed_log_w(n);
  double min_lw = std::numeric_limits<double>::infinity(), max_lw = neg_inf;
  for (std::size_t i = 0; i < n; ++i) {
    grad_evals_ += snippets_[i].grad_evals;
    for (Eigen::Index k = 0; k < snippets_[i].log_w.size(); ++k) {
      const double w = snippets_[i].log_w[k];
      flat_log_w.push_back(w);
      min_lw = std::min(min_lw, w);
      max_lw = std::max(max_lw, w);
    }
    seed_log_w[i] = log_sum_exp(snippets_[i].log_w) - std::log(static_cast<double>(T + 1));
  }
  const double lse = log_sum_exp(flat_log_w);
  if (!std::isfinite(lse))
    throw std::runtime_error(
        "run_iteration: total weight degeneracy; use a smaller tempering step or stepsize");
  const double log_z_inc = lse - std::log(static_cast<double>(total_states));

  IterationRecord rec;
  rec.iteration = cloud.iteration + 1;
  rec.gamma = gamma_next;
  rec.T = T;
  rec.ess_unfolded = ess_from_log_weights(flat_log_w);
  rec.ess_seed = ess_from_log_weights(seed_log_w);
  rec.log_z_increment = log_z_inc;
  rec.min_log_w = min_lw;
  rec.max_log_w = max_lw;
  {
    std::vector<double> eps_copy(cloud.epsilons);
    rec.median_epsilon = median(std::move(eps_copy));
  }

  // 3. Joint resampling over all N(T+1) states.
  RandomStream resample_stream = iter_stream.substream(0);
  const auto indices =
      resample(config_.resampling, flat_log_w, n, resample_stream);

  // 4. Inherit state, stepsize and label from the selected snippet.
  ParticleCloud next;
  next.states.resize(n);
  next.epsilons.resize(n);
  next.labels.resize(n);
  next.stats.resize(n);
  std::vector<double> pair_eps(n), pair_v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t b = indices[j] / static_cast<std::size_t>(T + 1);
    const std::size_t a = indices[j] % static_cast<std::size_t>(T + 1);
    next.states[j] = snippets_[b].states[a];
    next.epsilons[j] = snippets_[b].epsilon;
    next.labels[j] = snippets_[b].label;
    pair_eps[j] = snippets_[b].epsilon;
    pair_v[j] = v_criterion[b];
  }

  // 5. Fit the stepsize distribution on the post-resampling, pre-refresh
  //    (epsilon, v) pairs.
  if (config_.epsilon.adaptive)
    theta_ = fit_epsilon_distribution(pair_eps, pair_v, config_.epsilon.skewness, theta_);
  rec.theta = theta_;

  // 6. Refresh velocities, stepsizes and labels (sequential per-particle
  //    substreams; indices 0 and 1 are reserved for resampling and tau).
  for (std::size_t j = 0; j < n; ++j) {
    RandomStream stream = iter_stream.substream(2 + j);
    next.states[j].v = velocity_.sample(stream);
    if (integrators_.size() > 1)
      next.labels[j] = mixture_select(config_.mixture_proportions, stream);
    if (config_.epsilon.adaptive || config_.epsilon.fixed.size() > 1)
      next.epsilons[j] = draw_epsilon(next.labels[j], stream);
  }
  parallel_for(n, [&](std::size_t j) {
    next.stats[j] = family_->schedule_statistic(next.states[j].x);
  });

  next.gamma = gamma_next;
  next.iteration = cloud.iteration + 1;
  next.log_z = cloud.log_z + log_z_inc;
  rec.log_z_cumulative = next.log_z;

  // 7. Coupled-pair tau estimation chooses T for the next iteration.
  if (config_.adapt_tau) {
    RandomStream tau_stream = iter_stream.substream(1);
    const auto step_now = integrators_[0](gamma_next);
    const auto est = estimate_tau(*step_now, next.states, next.epsilons, T, config_.T_max,
                                  config_.tau_bins, tau_stream);
    grad_evals_ += est.grad_evals;
    if (est.updated) {
      tau_last_ = est.tau;
      T_next_ = est.T_next;
    } else {
      std::cerr << "snippet-smc: no usable coupled pair at iteration " << rec.iteration
                << "; keeping tau and T unchanged\n";
    }
  } else {
    T_next_ = config_.T;
  }
  rec.tau = tau_last_;

  cloud = std::move(next);
  const auto t_end = std::chrono::steady_clock::now();
  rec.wall_ms =
      fixed_clock()
          ? 0.0
          : std::chrono::duration<double, std::milli>(t_end - t_start).count();
  return rec;
}

RunResult SnippetSmcEngine::run() { return run(RandomStream(config_.seed)); }

RunResult SnippetSmcEngine::run(RandomStream root) {
  RandomStream init_stream = root.substream(0);
  ParticleCloud cloud = initialize(init_stream);

  RunResult result;
  grad_evals_ = 0;
  snippets_.clear();
  tau_last_ = 0.0;
  T_next_ = config_.T;
  theta_ = config_.epsilon.adaptive ? config_.epsilon.theta0 : config_.epsilon.fixed[0];

  int n_iter = 0;
  while (cloud.gamma < 1.0) {
    if (n_iter >= config_.max_iterations)
      throw std::runtime_error("run: iteration cap reached before gamma hit 1");
    double gamma_next = next_gamma_generic(
        cloud.size(),
        [&](double gamma, std::size_t i) {
          return family_->log_incremental(cloud.gamma, gamma, cloud.stats[i]);
        },
        cloud.gamma, config_.ess_target, 1e-8);
    if (gamma_next < cloud.gamma + config_.min_gamma_step)
      gamma_next = std::min(1.0, cloud.gamma + config_.min_gamma_step);

    RandomStream iter_stream = root.substream(1 + static_cast<std::uint64_t>(n_iter));
    result.records.push_back(run_iteration(cloud, gamma_next, T_next_, iter_stream));
    ++n_iter;
  }

  result.cloud = std::move(cloud);
  result.log_z = result.cloud.log_z;
  result.theta_final = theta_;
  result.gradient_evaluations = grad_evals_;
  if (!snippets_.empty()) {
    const auto est = estimate_unfolded(snippets_, position_observable());
    result.posterior_mean = est.value;
    result.posterior_mean_ess = est.ess;
  } else {
    // Degenerate schedule (gamma0 = 1): report the plain seed average.
    Vector mean = Vector::Zero(family_->dimension());
    for (const auto& z : result.cloud.states) mean += z.x;
    result.posterior_mean = mean / static_cast<double>(result.cloud.size());
    result.posterior_mean_ess = static_cast<double>(result.cloud.size());
  }
  return result;
}

}  // namespace snippet_smc
