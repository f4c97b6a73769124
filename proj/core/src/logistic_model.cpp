#include "snippet_smc/logistic_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace snippet_smc {

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// 1 / (1 + exp(t)) without overflow.
double sigmoid_neg(double t) {
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

LogisticRegressionTarget::LogisticRegressionTarget(Matrix design, Vector labels,
                                                   Vector prior_scales)
    : design_(std::move(design)), labels_(std::move(labels)),
      prior_scales_(std::move(prior_scales)) {
  if (design_.rows() < 1 || design_.cols() < 1)
    throw std::invalid_argument("LogisticRegressionTarget: empty design matrix");
  if (labels_.size() != design_.rows())
    throw std::invalid_argument("LogisticRegressionTarget: label count mismatch");
  if (prior_scales_.size() != design_.cols())
    throw std::invalid_argument("LogisticRegressionTarget: prior scale count mismatch");
  if ((prior_scales_.array() <= 0.0).any())
    throw std::invalid_argument("LogisticRegressionTarget: prior scales must be positive");
  for (Eigen::Index i = 0; i < labels_.size(); ++i)
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw std::invalid_argument("LogisticRegressionTarget: labels must be +1 or -1");
  log_prior_norm_ = -prior_scales_.array().log().sum() -
                    0.5 * static_cast<double>(prior_scales_.size()) *
                        std::log(2.0 * std::numbers::pi);
}

double LogisticRegressionTarget::log_prior(const Vector& x) const {
  return log_prior_norm_ - 0.5 * (x.array() / prior_scales_.array()).square().sum();
}

Vector LogisticRegressionTarget::grad_log_prior(const Vector& x) const {
  return (-x.array() / prior_scales_.array().square()).matrix();
}

double LogisticRegressionTarget::log_likelihood(const Vector& x) const {
  const Vector margins = labels_.cwiseProduct(design_ * x);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) ll -= softplus(-margins[i]);
  return ll;
}

Vector LogisticRegressionTarget::grad_log_likelihood(const Vector& x) const {
  const Vector margins = labels_.cwiseProduct(design_ * x);
  Vector s(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    s[i] = sigmoid_neg(margins[i]) * labels_[i];
  return design_.transpose() * s;
}

void LogisticRegressionTarget::likelihood_bundle(const Vector& x, double& loglik,
                                                 Vector& grad_loglik) const {
  // The margin vector is the costly term shared by value and gradient.
  const Vector margins = labels_.cwiseProduct(design_ * x);
  double ll = 0.0;
  Vector s(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    ll -= softplus(-margins[i]);
    s[i] = sigmoid_neg(margins[i]) * labels_[i];
  }
  loglik = ll;
  grad_loglik = design_.transpose() * s;
}

Vector LogisticRegressionTarget::sample_prior(RandomStream& rng) const {
  Vector x(prior_scales_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = prior_scales_[i] * rng.normal();
  return x;
}

LogisticRegressionTarget load_sonar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sonar: cannot open '" + path + "'");

  constexpr int kFeatures = 60;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> features;
    features.reserve(kFeatures);
    std::string label_token;
    while (std::getline(ss, field, ',')) {
      if (static_cast<int>(features.size()) < kFeatures) {
        try {
          std::size_t used = 0;
          const double v = std::stod(field, &used);
          if (used != field.size()) throw std::invalid_argument(field);
          features.push_back(v);
        } catch (const std::exception&) {
          throw std::runtime_error("load_sonar: line " + std::to_string(lineno) +
                                   ": bad numeric field '" + field + "'");
        }
      } else if (label_token.empty()) {
        label_token = field;
      } else {
        throw std::runtime_error("load_sonar: line " + std::to_string(lineno) +
                                 ": too many fields");
      }
    }
    if (static_cast<int>(features.size()) != kFeatures || label_token.empty())
      throw std::runtime_error("load_sonar: line " + std::to_string(lineno) +
                               ": expected 60 features and a class token");
    double y = 0.0;
    if (label_token == "R") y = 1.0;
    else if (label_token == "M") y = -1.0;
    else
      throw std::runtime_error("load_sonar: line " + std::to_string(lineno) +
                               ": unknown class token '" + label_token + "'");
    rows.push_back(std::move(features));
    labels.push_back(y);
  }
  if (rows.empty()) throw std::runtime_error("load_sonar: '" + path + "' contains no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = kFeatures + 1;  // intercept prepended
  Matrix design(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (int j = 0; j < kFeatures; ++j) design(i, j + 1) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    y[i] = labels[static_cast<size_t>(i)];
  }
  Vector scales = Vector::Constant(d, 5.0);
  scales[0] = 20.0;
  return LogisticRegressionTarget(std::move(design), std::move(y), std::move(scales));
}

}  // namespace snippet_smc
