#include "snippet_smc/epsilon_adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

double EpsilonDistribution::log_density(double eps) const {
  if (!(eps > 0.0)) return neg_inf;
  const double lambda = shape();
  const double diff = eps - theta;
  return 0.5 * std::log(lambda / (2.0 * std::numbers::pi * eps * eps * eps)) -
         lambda * diff * diff / (2.0 * theta * theta * eps);
}

double EpsilonDistribution::sample(RandomStream& rng) const {
  const double lambda = shape();
  const double n = rng.normal();
  const double y = n * n;
  const double x = theta + theta * theta * y / (2.0 * lambda) -
                   (theta / (2.0 * lambda)) * std::sqrt(4.0 * theta * lambda * y +
                                                        theta * theta * y * y);
  const double u = rng.uniform();
  const double value = (u <= theta / (theta + x)) ? x : theta * theta / x;
  return std::clamp(value, 1e-12, 1e12);
}

double snippet_variance_criterion(const Snippet& snippet) {
  const auto n = snippet.log_w.size();
  std::vector<double> p(static_cast<size_t>(n));
  const double lse = log_sum_exp(snippet.log_w);
  if (!std::isfinite(lse)) return 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = snippet.log_w[k];
    p[static_cast<size_t>(k)] = (w == neg_inf || std::isnan(w)) ? 0.0 : std::exp(w - lse);
  }
  Vector mean = Vector::Zero(snippet.states[0].x.size());
  for (Eigen::Index k = 0; k < n; ++k)
    if (p[static_cast<size_t>(k)] > 0.0) mean += p[static_cast<size_t>(k)] * snippet.states[static_cast<size_t>(k)].x;
  double v = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (p[static_cast<size_t>(k)] > 0.0)
      v += p[static_cast<size_t>(k)] * (snippet.states[static_cast<size_t>(k)].x - mean).squaredNorm();
  return v;
}

double fit_epsilon_distribution(std::span<const double> epsilons, std::span<const double> v,
                                double skewness, double fallback_theta) {
  if (epsilons.size() != v.size())
    throw std::invalid_argument("fit_epsilon_distribution: size mismatch");
  if (!(skewness > 0.0))
    throw std::invalid_argument("fit_epsilon_distribution: skewness must be positive");
  double sv = 0.0, sve = 0.0, svinv = 0.0;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0))
      throw std::invalid_argument("fit_epsilon_distribution: stepsizes must be positive");
    const double vi = v[i];
    if (!(vi >= 0.0)) throw std::invalid_argument("fit_epsilon_distribution: v must be >= 0");
    sv += vi;
    sve += vi * epsilons[i];
    svinv += vi / epsilons[i];
  }
  if (!(sv > 0.0) || !std::isfinite(sv)) return fallback_theta;
  const double m1 = sve / sv;
  const double mm1 = svinv / sv;
  const double a = skewness * skewness / 9.0;
  return (a + std::sqrt(a * a + 4.0 * mm1 * m1)) / (2.0 * mm1);
}

}  // namespace snippet_smc
