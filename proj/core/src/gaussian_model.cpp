#include "snippet_smc/gaussian_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snippet_smc {

GaussianTarget::GaussianTarget(Vector variances, Vector likelihood_precisions)
    : variances_(std::move(variances)), precisions_(std::move(likelihood_precisions)) {
  if (variances_.size() < 1) throw std::invalid_argument("GaussianTarget: empty variances");
  if ((variances_.array() <= 0.0).any() || !variances_.allFinite())
    throw std::invalid_argument("GaussianTarget: variances must be finite and positive");
  if (precisions_.size() == 0) precisions_ = Vector::Zero(variances_.size());
  if (precisions_.size() != variances_.size())
    throw std::invalid_argument("GaussianTarget: precision/variance size mismatch");
  log_prior_norm_ = -0.5 * variances_.array().log().sum() -
                    0.5 * static_cast<double>(variances_.size()) *
                        std::log(2.0 * std::numbers::pi);
}

double GaussianTarget::log_prior(const Vector& x) const {
  return log_prior_norm_ - 0.5 * (x.array().square() / variances_.array()).sum();
}

double GaussianTarget::log_likelihood(const Vector& x) const {
  return -0.5 * (precisions_.array() * x.array().square()).sum();
}

Vector GaussianTarget::grad_log_prior(const Vector& x) const {
  return (-x.array() / variances_.array()).matrix();
}

Vector GaussianTarget::grad_log_likelihood(const Vector& x) const {
  return (-precisions_.array() * x.array()).matrix();
}

Vector GaussianTarget::sample_prior(RandomStream& rng) const {
  Vector x(variances_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::sqrt(variances_[i]) * rng.normal();
  return x;
}

double GaussianTarget::log_evidence(double gamma) const {
  return -0.5 * (1.0 + gamma * precisions_.array() * variances_.array()).log().sum();
}

double GaussianTarget::hamiltonian(const PhaseState& z) const {
  return 0.5 * (z.x.array().square() / variances_.array()).sum() + 0.5 * z.v.squaredNorm();
}

PhaseState exact_gaussian_flow(const GaussianTarget& target, double t, const PhaseState& z) {
  const Vector& var = target.variances();
  PhaseState out;
  out.x.resize(z.x.size());
  out.v.resize(z.v.size());
  for (Eigen::Index i = 0; i < z.x.size(); ++i) {
    const double sigma = std::sqrt(var[i]);
    const double a = t / sigma;
    const double c = std::cos(a), s = std::sin(a);
    out.x[i] = z.x[i] * c + sigma * z.v[i] * s;
    out.v[i] = z.v[i] * c - (z.x[i] / sigma) * s;
  }
  return out;
}

}  // namespace snippet_smc
