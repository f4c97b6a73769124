#include "snippet_smc/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

namespace {

std::vector<double> cumulative_weights(std::span<const double> log_weights) {
  double m = neg_inf;
  for (double w : log_weights)
    if (!std::isnan(w)) m = std::max(m, w);
  if (!std::isfinite(m))
    throw std::domain_error("resample: total degeneracy, all weights are zero");
  std::vector<double> cum(log_weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double w = log_weights[i];
    if (!std::isnan(w) && w != neg_inf) acc += std::exp(w - m);
    cum[i] = acc;
  }
  return cum;
}

std::size_t locate(const std::vector<double>& cum, double u) {
  const auto it = std::lower_bound(cum.begin(), cum.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

}  // namespace

std::vector<std::size_t> resample_multinomial(std::span<const double> log_weights,
                                              std::size_t n, RandomStream& rng) {
  const auto cum = cumulative_weights(log_weights);
  const double total = cum.back();
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) idx[j] = locate(cum, rng.uniform() * total);
  return idx;
}

std::vector<std::size_t> resample_systematic(std::span<const double> log_weights,
                                             std::size_t n, RandomStream& rng) {
  const auto cum = cumulative_weights(log_weights);
  const double total = cum.back();
  const double u0 = rng.uniform();
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = total * (static_cast<double>(j) + u0) / static_cast<double>(n);
    idx[j] = locate(cum, u);
  }
  return idx;
}

std::vector<std::size_t> resample(ResamplingKind kind, std::span<const double> log_weights,
                                  std::size_t n, RandomStream& rng) {
  return kind == ResamplingKind::multinomial ? resample_multinomial(log_weights, n, rng)
                                             : resample_systematic(log_weights, n, rng);
}

}  // namespace snippet_smc
