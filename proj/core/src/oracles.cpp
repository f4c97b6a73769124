#include "snippet_smc/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

PhaseState sample_mu_bar(const IntegratorStep& step, double epsilon, int T,
                         const std::function<PhaseState(RandomStream&)>& sample_mu,
                         RandomStream& rng) {
  PhaseState z = sample_mu(rng);
  const auto k = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(T) + 1));
  if (k == 0) return z;
  StepContext ctx;
  PhaseState w = flip_velocity(z);
  step.prime(w, ctx);
  for (int j = 0; j < k; ++j) w = step.step(epsilon, w, ctx);
  return flip_velocity(w);
}

double rao_blackwell_oracle(std::span<const Snippet> snippets, const ScalarObservable& f) {
  return rao_blackwell_discrepancy(snippets, snippets, f);
}

double rao_blackwell_discrepancy(std::span<const Snippet> unfolded,
                                 std::span<const Snippet> folded,
                                 const ScalarObservable& f) {
  const std::size_t n = unfolded.size();
  if (n == 0) throw std::invalid_argument("rao_blackwell_oracle: no snippets");
  if (folded.size() != n)
    throw std::invalid_argument("rao_blackwell_oracle: side size mismatch");
  const auto states_per = static_cast<std::size_t>(unfolded[0].log_w.size());
  const std::size_t candidates = n * states_per;
  if (candidates > 64)
    throw std::invalid_argument("rao_blackwell_oracle: instance too large (> 64 states)");
  const double tuples = std::pow(static_cast<double>(candidates), static_cast<double>(n));
  if (tuples > 1e8)
    throw std::invalid_argument("rao_blackwell_oracle: instance too large (tuple count)");

  // Joint resampling probabilities P_{i,k} and per-snippet folded averages.
  std::vector<double> logw;
  logw.reserve(candidates);
  for (const Snippet& s : unfolded) {
    if (static_cast<std::size_t>(s.log_w.size()) != states_per)
      throw std::invalid_argument("rao_blackwell_oracle: ragged snippet lengths");
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k) logw.push_back(s.log_w[k]);
  }
  std::vector<double> prob(candidates);
  normalize_log_weights(logw, prob);

  double mu_hat = 0.0;
  std::vector<double> folded_avg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Snippet& s = folded[i];
    const double lse = log_sum_exp(s.log_w);
    double avg = 0.0;
    for (std::size_t k = 0; k < states_per; ++k) {
      const double w = s.log_w[static_cast<Eigen::Index>(k)];
      const double pk = (std::isfinite(lse) && w != neg_inf && !std::isnan(w))
                            ? std::exp(w - lse)
                            : 0.0;
      avg += pk * f(s.states[k]);
      mu_hat += prob[i * states_per + k] * f(unfolded[i].states[k]);
    }
    folded_avg[i] = avg;
  }

  // Odometer over all tuples (c_1, ..., c_N) of candidate indices.
  std::vector<std::size_t> c(n, 0);
  double expectation = 0.0;
  while (true) {
    double p = 1.0;
    double check_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      p *= prob[c[j]];
      check_sum += folded_avg[c[j] / states_per];
    }
    expectation += p * (check_sum / static_cast<double>(n));
    std::size_t pos = 0;
    while (pos < n && ++c[pos] == candidates) {
      c[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return std::abs(expectation - mu_hat);
}

VarianceDecomposition variance_decomposition_check(
    const IntegratorStep& step, double epsilon, int T,
    const std::function<PhaseState(RandomStream&)>& sample_mu,
    const std::function<double(const PhaseState&)>& log_mu, const ScalarObservable& f,
    std::size_t n_samples, RandomStream& rng, std::size_t batches) {
  if (batches < 2 || n_samples < batches)
    throw std::invalid_argument("variance_decomposition_check: bad batch configuration");
  const std::size_t per_batch = n_samples / batches;

  std::vector<double> gap_b(batches), red_b(batches), t1_b(batches), t2_b(batches),
      vd_b(batches);
  std::vector<double> logp(static_cast<std::size_t>(T) + 1);
  std::vector<double> p(static_cast<std::size_t>(T) + 1);
  std::vector<double> fvals(static_cast<std::size_t>(T) + 1);

  for (std::size_t b = 0; b < batches; ++b) {
    double sum_cm = 0.0, sum_cm2 = 0.0, sum_cv = 0.0;
    double sum_f = 0.0, sum_f2 = 0.0;
    for (std::size_t s = 0; s < per_batch; ++s) {
      // Direct mu sample for var_mu(f).
      const PhaseState direct = sample_mu(rng);
      const double fd = f(direct);
      sum_f += fd;
      sum_f2 += fd * fd;

      // Mixture sample and its within-snippet conditional moments.
      PhaseState z = sample_mu_bar(step, epsilon, T, sample_mu, rng);
      StepContext ctx;
      step.prime(z, ctx);
      PhaseState cur = z;
      for (int k = 0; k <= T; ++k) {
        if (k > 0) cur = step.step(epsilon, cur, ctx);
        logp[static_cast<std::size_t>(k)] = log_mu(cur);
        fvals[static_cast<std::size_t>(k)] = f(cur);
      }
      normalize_log_weights(logp, p);
      double cm = 0.0;
      for (std::size_t k = 0; k <= static_cast<std::size_t>(T); ++k) cm += p[k] * fvals[k];
      double cv = 0.0;
      for (std::size_t k = 0; k <= static_cast<std::size_t>(T); ++k)
        cv += p[k] * (fvals[k] - cm) * (fvals[k] - cm);
      sum_cm += cm;
      sum_cm2 += cm * cm;
      sum_cv += cv;
    }
    const double m = static_cast<double>(per_batch);
    const double mean_cm = sum_cm / m;
    t1_b[b] = sum_cm2 / m - mean_cm * mean_cm;
    t2_b[b] = sum_cv / m;
    const double mean_f = sum_f / m;
    vd_b[b] = sum_f2 / m - mean_f * mean_f;
    gap_b[b] = t1_b[b] + t2_b[b] - vd_b[b];
    red_b[b] = t1_b[b] - vd_b[b];
  }

  VarianceDecomposition out;
  out.term_between = mean_and_se(t1_b).mean;
  out.term_within = mean_and_se(t2_b).mean;
  out.var_direct = mean_and_se(vd_b).mean;
  const auto gap = mean_and_se(gap_b);
  out.identity_gap = gap.mean;
  out.identity_se = gap.se;
  const auto red = mean_and_se(red_b);
  out.reduction_gap = red.mean;
  out.reduction_se = red.se;
  return out;
}

}  // namespace snippet_smc
