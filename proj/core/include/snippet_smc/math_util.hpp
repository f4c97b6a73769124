#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace snippet_smc {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// log(sum_i exp(w_i)) with max-subtraction; -inf entries contribute zero
/// mass. Returns -inf when every entry is -inf.
inline double log_sum_exp(std::span<const double> w) {
  double m = neg_inf;
  for (double wi : w) {
    if (std::isnan(wi)) continue;
    m = std::max(m, wi);
  }
  if (!std::isfinite(m)) return neg_inf;
  double s = 0.0;
  for (double wi : w) {
    if (std::isnan(wi) || wi == neg_inf) continue;
    s += std::exp(wi - m);
  }
  return m + std::log(s);
}

inline double log_sum_exp(const Eigen::VectorXd& w) {
  return log_sum_exp(std::span<const double>(w.data(), static_cast<size_t>(w.size())));
}

/// Normalize log weights to probabilities in place: p_i = exp(w_i - lse).
/// -inf weights map to exactly 0. Returns the log normalizer.
inline double normalize_log_weights(std::span<const double> logw, std::span<double> p) {
  const double lse = log_sum_exp(logw);
  for (size_t i = 0; i < logw.size(); ++i) {
    const double wi = logw[i];
    p[i] = (std::isfinite(lse) && !std::isnan(wi) && wi != neg_inf) ? std::exp(wi - lse) : 0.0;
  }
  return lse;
}

/// Self-normalized effective sample size (sum w)^2 / sum w^2 computed from
/// log weights; invariant under scaling of the weights.
inline double ess_from_log_weights(std::span<const double> logw) {
  double m = neg_inf;
  for (double wi : logw)
    if (!std::isnan(wi)) m = std::max(m, wi);
  if (!std::isfinite(m)) return 0.0;
  double s1 = 0.0, s2 = 0.0;
  for (double wi : logw) {
    if (std::isnan(wi) || wi == neg_inf) continue;
    const double w = std::exp(wi - m);
    s1 += w;
    s2 += w * w;
  }
  return (s2 > 0.0) ? s1 * s1 / s2 : 0.0;
}

inline double ess_from_log_weights(const Eigen::VectorXd& w) {
  return ess_from_log_weights(std::span<const double>(w.data(), static_cast<size_t>(w.size())));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

/// Mean and standard error of a sample.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  if (x.empty()) return {};
  double m = 0.0;
  for (double xi : x) m += xi;
  m /= n;
  if (x.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double xi : x) ss += (xi - m) * (xi - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace snippet_smc
