#include "snippet_smc/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "snippet_smc/math_util.hpp"

namespace snippet_smc {

namespace {

std::vector<double> gather_log_weights(std::span<const Snippet> snippets) {
  std::vector<double> logw;
  for (const Snippet& s : snippets)
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k) logw.push_back(s.log_w[k]);
  return logw;
}

}  // namespace

WeightedEstimate estimate_unfolded(std::span<const Snippet> snippets, const Observable& f) {
  if (snippets.empty()) throw std::invalid_argument("estimate_unfolded: no snippets");
  const auto logw = gather_log_weights(snippets);
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse))
    throw std::domain_error("estimate_unfolded: all weights are zero");

  WeightedEstimate est;
  est.value = Vector::Zero(f(snippets[0].states[0]).size());
  for (const Snippet& s : snippets) {
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k) {
      const double w = s.log_w[k];
      if (w == neg_inf || std::isnan(w)) continue;
      est.value += std::exp(w - lse) * f(s.states[static_cast<size_t>(k)]);
      ++est.contributing_states;
    }
  }
  est.ess = ess_from_log_weights(logw);
  return est;
}

WeightedEstimate estimate_folded(std::span<const Snippet> snippets, const Observable& f) {
  if (snippets.empty()) throw std::invalid_argument("estimate_folded: no snippets");
  WeightedEstimate est;
  est.value = Vector::Zero(f(snippets[0].states[0]).size());
  const double inv_n = 1.0 / static_cast<double>(snippets.size());
  std::vector<double> seed_lse;
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    const Snippet& s = snippets[i];
    const double lse = log_sum_exp(s.log_w);
    if (!std::isfinite(lse))
      throw std::domain_error("estimate_folded: snippet " + std::to_string(i) +
                              " has no finite weight");
    seed_lse.push_back(lse);
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k) {
      const double w = s.log_w[k];
      if (w == neg_inf || std::isnan(w)) continue;
      est.value += inv_n * std::exp(w - lse) * f(s.states[static_cast<size_t>(k)]);
      ++est.contributing_states;
    }
  }
  est.ess = ess_from_log_weights(seed_lse);  // seed-level aggregate ESS
  return est;
}

double unfolded_ess(std::span<const Snippet> snippets) {
  return ess_from_log_weights(gather_log_weights(snippets));
}

double folded_ess_bound(std::span<const Snippet> snippets) {
  // S_i = sum_k mu(psi^k(z_i)); the ratio below is invariant to scaling mu.
  std::vector<double> log_s;
  log_s.reserve(snippets.size());
  for (const Snippet& s : snippets) log_s.push_back(log_sum_exp(s.log_mu_next));
  double m = neg_inf;
  for (double ls : log_s) m = std::max(m, ls);
  if (!std::isfinite(m)) return 0.0;
  double a = 0.0, b = 0.0;
  for (double ls : log_s) {
    if (ls == neg_inf) continue;
    const double r = std::exp(ls - m);
    a += r;
    b += r * r;
  }
  const double n = static_cast<double>(snippets.size());
  a /= n;
  b /= n;
  const double denom = 2.0 * b - a * a;
  return denom > 0.0 ? 0.5 * n * a * a / denom : 0.0;
}

double esjd(std::span<const Snippet> snippets, const ScalarObservable& f) {
  double total = 0.0;
  std::vector<double> p;
  for (const Snippet& s : snippets) {
    const auto n = static_cast<std::size_t>(s.log_w.size());
    p.assign(n, 0.0);
    const double lse = log_sum_exp(s.log_w);
    if (!std::isfinite(lse)) continue;
    std::vector<double> fw(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = s.log_w[static_cast<Eigen::Index>(k)];
      p[k] = (w == neg_inf || std::isnan(w)) ? 0.0 : std::exp(w - lse);
      fw[k] = f(s.states[k]) * p[k];
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k + 1; l < n; ++l) {
        const double d = fw[l] - fw[k];
        total += d * d;
      }
  }
  return total;
}

RelativeEfficiency relative_efficiency(std::span<const Snippet> snippets) {
  if (snippets.empty()) throw std::invalid_argument("relative_efficiency: no snippets");
  const auto K = static_cast<std::size_t>(snippets[0].log_w.size());
  const double n = static_cast<double>(snippets.size());

  // Scale all weights so that the grand mean of the per-snippet row means is
  // one, matching normalized pushforward densities in expectation.
  double max_lw = neg_inf;
  for (const Snippet& s : snippets)
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k)
      if (!std::isnan(s.log_w[k])) max_lw = std::max(max_lw, s.log_w[k]);
  if (!std::isfinite(max_lw)) return {};
  double grand = 0.0;
  for (const Snippet& s : snippets)
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k) {
      const double w = s.log_w[k];
      if (!std::isnan(w) && w != neg_inf) grand += std::exp(w - max_lw);
    }
  const double scale = grand / (n * static_cast<double>(K));
  if (!(scale > 0.0)) return {};

  double a = 0.0, b = 0.0, c = 0.0;
  for (const Snippet& s : snippets) {
    double row = 0.0;
    for (Eigen::Index k = 0; k < s.log_w.size(); ++k) {
      const double lw = s.log_w[k];
      const double w =
          (std::isnan(lw) || lw == neg_inf) ? 0.0 : std::exp(lw - max_lw) / scale;
      row += w;
      b += w * w / n;
    }
    a += row * row / n;
    const double w0 = (s.log_w[0] == neg_inf) ? 0.0 : std::exp(s.log_w[0] - max_lw) / scale;
    const double lwT = s.log_w[s.log_w.size() - 1];
    const double wT = (lwT == neg_inf) ? 0.0 : std::exp(lwT - max_lw) / scale;
    c += (w0 + wT) * (w0 + wT) / n;
  }

  const double kd = static_cast<double>(K);
  RelativeEfficiency re;
  re.re0 = 2.0 * (2.0 * a / kd - kd);
  re.re1 = (2.0 * a / kd - kd) / (2.0 * b / kd - kd);
  re.re2 = (4.0 * a / (kd * kd) - 2.0) / (c - 2.0);
  return re;
}

}  // namespace snippet_smc
