#include "snippet_smc/markov_snippet.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "snippet_smc/gamma_schedule.hpp"
#include "snippet_smc/math_util.hpp"
#include "snippet_smc/parallel.hpp"
#include "snippet_smc/resampling.hpp"

namespace snippet_smc {

MarkovSnippetWeights markov_snippet_weights(const MarkovSnippet& snippet) {
  if (snippet.states.empty())
    throw std::invalid_argument("markov_snippet_weights: empty snippet");
  if (snippet.log_mu_next.size() != static_cast<Eigen::Index>(snippet.states.size()))
    throw std::invalid_argument("markov_snippet_weights: density cache size mismatch");
  if (!(snippet.log_mu_prev_seed > neg_inf) || std::isnan(snippet.log_mu_prev_seed))
    throw std::domain_error("markov_snippet_weights: seed outside the support of mu_prev");
  MarkovSnippetWeights w;
  w.log_w = snippet.log_mu_next.array() - snippet.log_mu_prev_seed;
  for (Eigen::Index k = 0; k < w.log_w.size(); ++k)
    if (std::isnan(w.log_w[k])) w.log_w[k] = neg_inf;
  w.log_w_bar = log_sum_exp(w.log_w) - std::log(static_cast<double>(w.log_w.size()));
  return w;
}

RwmhResult rwmh_step(const std::function<double(const Vector&)>& log_density,
                     const Matrix& proposal_chol, const Vector& x, double current_log_density,
                     RandomStream& rng) {
  Vector noise(x.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
  const Vector proposal = x + proposal_chol * noise;
  const double lp = log_density(proposal);
  const double log_u = std::log(rng.uniform());
  RwmhResult out;
  if (log_u < lp - current_log_density) {
    out.x = proposal;
    out.accepted = true;
  } else {
    out.x = x;
    out.accepted = false;
  }
  return out;
}

Matrix adaptive_proposal_cholesky(const std::vector<Vector>& positions) {
  if (positions.size() < 2)
    throw std::invalid_argument("adaptive_proposal_cholesky: need at least 2 positions");
  const auto d = positions[0].size();
  Vector mean = Vector::Zero(d);
  for (const Vector& x : positions) mean += x;
  mean /= static_cast<double>(positions.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const Vector& x : positions) {
    const Vector c = x - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(positions.size() - 1);
  const double load = 1e-9 * cov.trace() / static_cast<double>(d);
  cov.diagonal().array() += (load > 0.0 ? load : 1e-12);
  cov *= 2.38 * 2.38 / static_cast<double>(d);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("adaptive_proposal_cholesky: covariance not positive definite");
  return llt.matrixL();
}

MarkovSnippetSmc::MarkovSnippetSmc(std::shared_ptr<const AnnealedFamily> family,
                                   MarkovSnippetConfig config)
    : family_(std::move(family)), config_(config) {
  if (config_.n_particles < 2)
    throw std::invalid_argument("markov snippet smc: need at least 2 particles");
  if (config_.chain_length < 0)
    throw std::invalid_argument("markov snippet smc: chain length must be >= 0");
}

double MarkovSnippetSmc::run_iteration(std::vector<Vector>& positions,
                                       std::vector<double>& stats, double gamma_prev,
                                       double gamma_next, RandomStream& iter_stream) {
  const std::size_t n = positions.size();
  const int T = config_.chain_length;

  // Proposal covariance from the previous iteration's particles only.
  const Matrix chol = adaptive_proposal_cholesky(positions);

  snippets_.assign(n, MarkovSnippet{});
  std::vector<std::size_t> accepted(n, 0);
  parallel_for(n, [&](std::size_t i) {
    RandomStream chain_stream = iter_stream.substream(2 + i);
    MarkovSnippet& s = snippets_[i];
    s.states.resize(static_cast<std::size_t>(T) + 1);
    s.log_mu_next.resize(T + 1);
    std::vector<double> chain_stats(static_cast<std::size_t>(T) + 1);

    // The chain targets the current temperature; with densities taken
    // w.r.t. that target, the seed density is exactly 1.
    s.log_mu_prev_seed = 0.0;
    s.states[0] = positions[i];
    chain_stats[0] = stats[i];
    double cur_stat = stats[i];
    double cur_lp = family_->log_pi_given_stat(gamma_prev, positions[i], cur_stat);
    Vector cur_x = positions[i];
    for (int k = 1; k <= T; ++k) {
      double prop_stat = 0.0;
      const auto log_density = [&](const Vector& x) {
        prop_stat = family_->schedule_statistic(x);
        return family_->log_pi_given_stat(gamma_prev, x, prop_stat);
      };
      const RwmhResult step = rwmh_step(log_density, chol, cur_x, cur_lp, chain_stream);
      if (step.accepted) {
        cur_x = step.x;
        cur_stat = prop_stat;
        cur_lp = family_->log_pi_given_stat(gamma_prev, cur_x, cur_stat);
        ++accepted[i];
      }
      s.states[static_cast<std::size_t>(k)] = cur_x;
      chain_stats[static_cast<std::size_t>(k)] = cur_stat;
    }
    for (int k = 0; k <= T; ++k)
      s.log_mu_next[k] =
          family_->log_incremental(gamma_prev, gamma_next, chain_stats[static_cast<std::size_t>(k)]);
  });

  std::size_t total_accepted = 0;
  for (std::size_t a : accepted) total_accepted += a;
  acceptance_rate_ = (T > 0) ? static_cast<double>(total_accepted) /
                                   (static_cast<double>(n) * static_cast<double>(T))
                             : 1.0;

  // Flat weights over all N(T+1) states; joint resampling is equivalent to
  // snippet-level selection by the aggregate weight followed by the
  // within-snippet categorical draw.
  std::vector<double> flat;
  flat.reserve(n * static_cast<std::size_t>(T + 1));
  for (const MarkovSnippet& s : snippets_) {
    const auto w = markov_snippet_weights(s);
    for (Eigen::Index k = 0; k < w.log_w.size(); ++k) flat.push_back(w.log_w[k]);
  }
  const double lse = log_sum_exp(flat);
  if (!std::isfinite(lse))
    throw std::runtime_error("markov snippet smc: total weight degeneracy");
  const double log_z_inc = lse - std::log(static_cast<double>(flat.size()));

  RandomStream resample_stream = iter_stream.substream(0);
  const auto indices = resample_multinomial(flat, n, resample_stream);
  std::vector<Vector> new_positions(n);
  std::vector<double> new_stats(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t b = indices[j] / static_cast<std::size_t>(T + 1);
    const std::size_t a = indices[j] % static_cast<std::size_t>(T + 1);
    new_positions[j] = snippets_[b].states[a];
    new_stats[j] = family_->schedule_statistic(new_positions[j]);
  }
  positions = std::move(new_positions);
  stats = std::move(new_stats);
  return log_z_inc;
}

MarkovSnippetRunResult MarkovSnippetSmc::run() {
  RandomStream root(config_.seed);
  RandomStream init_stream = root.substream(0);
  const auto n = static_cast<std::size_t>(config_.n_particles);
  std::vector<Vector> positions(n);
  std::vector<double> stats(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream stream = init_stream.substream(i);
    positions[i] = family_->sample_initial(stream);
  }
  parallel_for(n, [&](std::size_t i) {
    stats[i] = family_->schedule_statistic(positions[i]);
  });

  MarkovSnippetRunResult result;
  double gamma = config_.gamma0;
  double log_z = 0.0;
  int n_iter = 0;
  while (gamma < 1.0) {
    if (n_iter >= config_.max_iterations)
      throw std::runtime_error("markov snippet smc: iteration cap reached");
    double gamma_next = next_gamma_generic(
        n,
        [&](double g, std::size_t i) { return family_->log_incremental(gamma, g, stats[i]); },
        gamma, config_.ess_target, 1e-8);
    if (gamma_next < gamma + config_.min_gamma_step)
      gamma_next = std::min(1.0, gamma + config_.min_gamma_step);

    const auto t_start = std::chrono::steady_clock::now();
    RandomStream iter_stream = root.substream(1 + static_cast<std::uint64_t>(n_iter));
    const double inc = run_iteration(positions, stats, gamma, gamma_next, iter_stream);
    log_z += inc;
    gamma = gamma_next;
    ++n_iter;

    IterationRecord rec;
    rec.iteration = n_iter;
    rec.gamma = gamma;
    rec.T = config_.chain_length;
    rec.log_z_increment = inc;
    rec.log_z_cumulative = log_z;
    const auto t_end = std::chrono::steady_clock::now();
    rec.wall_ms = std::getenv("SNIPPET_SMC_FIXED_CLOCK")
                      ? 0.0
                      : std::chrono::duration<double, std::milli>(t_end - t_start).count();
    result.records.push_back(rec);
  }

  result.log_z = log_z;
  Vector mean = Vector::Zero(family_->dimension());
  for (const Vector& x : positions) mean += x;
  result.posterior_mean = mean / static_cast<double>(n);
  result.final_positions = std::move(positions);
  return result;
}

}  // namespace snippet_smc
