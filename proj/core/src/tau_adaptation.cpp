#include "snippet_smc/tau_adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "snippet_smc/math_util.hpp"
#include "snippet_smc/parallel.hpp"

namespace snippet_smc {

TauEstimationResult estimate_tau(const IntegratorStep& step,
                                 const std::vector<PhaseState>& particles,
                                 const std::vector<double>& epsilons, int T_current,
                                 int T_max, int bins, RandomStream& rng) {
  const std::size_t n = particles.size();
  if (n < 4) throw std::invalid_argument("estimate_tau: need at least 4 particles");
  if (epsilons.size() != n) throw std::invalid_argument("estimate_tau: epsilon count mismatch");
  if (T_current < 1 || T_max < 1 || bins < 1)
    throw std::invalid_argument("estimate_tau: T and bin counts must be positive");

  TauEstimationResult result;
  const std::size_t n_pairs = n / 2;

  // Pair selection is sequential RNG work; the integration below is not.
  struct Pair {
    PhaseState z1, z2;
    double eps;
    double d0;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n_pairs);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 200 * n;
  while (pairs.size() < n_pairs && attempts < max_attempts) {
    ++attempts;
    const auto i1 = static_cast<std::size_t>(rng.uniform_index(n));
    const auto i2 = static_cast<std::size_t>(rng.uniform_index(n));
    if (i1 == i2 || particles[i1].x == particles[i2].x) continue;
    Pair p;
    p.eps = epsilons[i1];
    p.z1 = particles[i1];
    p.z2 = {particles[i2].x, particles[i1].v};  // coupled: first member's velocity
    p.d0 = (p.z1.x - p.z2.x).norm();
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) {
    result.updated = false;
    result.T_next = T_current;
    return result;
  }

  const auto T = static_cast<std::size_t>(T_current);
  result.data.tau.assign(pairs.size(), std::vector<double>(T));
  result.data.kappa.assign(pairs.size(), std::vector<double>(T));
  std::vector<std::uint64_t> pair_grad_evals(pairs.size(), 0);

  parallel_for(pairs.size(), [&](std::size_t j) {
    const Pair& p = pairs[j];
    StepContext ctx1, ctx2;
    step.prime(p.z1, ctx1);
    step.prime(p.z2, ctx2);
    PhaseState a = p.z1, b = p.z2;
    double dist_sum = p.d0 / p.d0;  // k = 0 term, exactly 1
    for (std::size_t m = 1; m <= T; ++m) {
      bool ok = true;
      if (a.is_finite()) a = step.step(p.eps, a, ctx1);
      else ok = false;
      if (b.is_finite()) b = step.step(p.eps, b, ctx2);
      else ok = false;
      double ratio = std::numeric_limits<double>::quiet_NaN();
      if (ok && a.is_finite() && b.is_finite()) ratio = (a.x - b.x).norm() / p.d0;
      dist_sum += ratio;
      result.data.tau[j][m - 1] = static_cast<double>(m) * p.eps;
      result.data.kappa[j][m - 1] = dist_sum / static_cast<double>(m);
    }
    pair_grad_evals[j] = ctx1.grad_evals + ctx2.grad_evals;
  });
  for (std::uint64_t g : pair_grad_evals) result.grad_evals += g;

  double tau_max = 0.0;
  for (std::size_t j = 0; j < pairs.size(); ++j)
    for (std::size_t m = 0; m < T; ++m)
      if (std::isfinite(result.data.kappa[j][m]))
        tau_max = std::max(tau_max, result.data.tau[j][m]);
  if (!(tau_max > 0.0)) {
    result.updated = false;
    result.T_next = T_current;
    return result;
  }

  const double width = tau_max / static_cast<double>(bins);
  std::vector<double> sums(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    for (std::size_t m = 0; m < T; ++m) {
      const double kap = result.data.kappa[j][m];
      if (!std::isfinite(kap)) continue;
      auto bin = static_cast<std::size_t>(result.data.tau[j][m] / width);
      bin = std::min(bin, static_cast<std::size_t>(bins) - 1);
      sums[bin] += kap;
      counts[bin] += 1;
    }
  }

  double best_kappa = std::numeric_limits<double>::infinity();
  double best_tau = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(bins); ++i) {
    if (counts[i] == 0) continue;  // empty bins are skipped, not zero-filled
    const double center = (static_cast<double>(i) + 0.5) * width;
    const double avg = sums[i] / static_cast<double>(counts[i]);
    result.data.bin_centers.push_back(center);
    result.data.bin_kappa.push_back(avg);
    if (avg < best_kappa) {
      best_kappa = avg;
      best_tau = center;  // first hit is the smallest center at the minimum
    }
  }

  std::vector<double> eps_copy(epsilons.begin(), epsilons.end());
  const double med = median(std::move(eps_copy));
  int T_next = static_cast<int>(std::ceil(best_tau / med));
  T_next = std::clamp(T_next, 1, T_max);

  result.tau = best_tau;
  result.T_next = T_next;
  result.updated = true;
  result.data.tau_selected = best_tau;
  result.data.T_next = T_next;
  return result;
}

}  // namespace snippet_smc
