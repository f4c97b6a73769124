#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/integrator.hpp"
#include "snippet_smc/tau_adaptation.hpp"

using namespace snippet_smc;

namespace {

PositionTarget zero_gradient() {
  PositionTarget t;
  t.log_density_and_grad = [](const Vector& x, double& lp, Vector& g) {
    lp = 0.0;
    g = Vector::Zero(x.size());
  };
  return t;
}

std::vector<PhaseState> integer_cloud(int n, RandomStream& rng) {
  std::vector<PhaseState> cloud;
  for (int i = 0; i < n; ++i) {
    Vector x(2), v(2);
    for (int j = 0; j < 2; ++j) {
      x[j] = static_cast<double>(rng.uniform_index(9)) - 4.0;
      v[j] = static_cast<double>(rng.uniform_index(5)) - 2.0;
    }
    cloud.push_back({x, v});
  }
  return cloud;
}

}  // namespace

TEST_CASE("free particle contraction coefficients are exactly (m+1)/m") {
  LeapfrogStep step(zero_gradient());
  RandomStream rng(51);
  const auto cloud = integer_cloud(10, rng);
  const std::vector<double> eps(10, 0.5);
  const auto est = estimate_tau(step, cloud, eps, 15, 64, 25, rng);
  REQUIRE(est.updated);
  REQUIRE(!est.data.kappa.empty());
  for (const auto& curve : est.data.kappa)
    for (std::size_t m = 0; m < curve.size(); ++m)
      CHECK(curve[m] == (static_cast<double>(m) + 2.0) / (static_cast<double>(m) + 1.0));
}

TEST_CASE("coupled exact Gaussian flow locates the analytic trough") {
  // Coupled pairs under the unit-variance flow separate as |cos t|; the
  // binned argmin must land within one bin width of the argmin of the
  // discrete averaged-|cos| curve.
  auto target = std::make_shared<const GaussianTarget>(Vector::Constant(1, 1.0));
  ExactGaussianFlowStep step(target);
  RandomStream rng(52);
  const int n = 64;
  std::vector<PhaseState> cloud;
  for (int i = 0; i < n; ++i)
    cloud.push_back({Vector::Constant(1, rng.normal()), Vector::Constant(1, rng.normal())});
  const double eps = 0.1;
  const int T = 40;
  const int bins = 40;
  const std::vector<double> eps_all(static_cast<size_t>(n), eps);
  const auto est = estimate_tau(step, cloud, eps_all, T, 100, bins, rng);
  REQUIRE(est.updated);

  // Scripted oracle: kappa(m) = m^{-1} sum_{k=0}^m |cos(k eps)| for every
  // pair, identical across pairs, binned on the same grid.
  std::vector<double> oracle_kappa(static_cast<size_t>(T));
  double run = 1.0;
  for (int m = 1; m <= T; ++m) {
    run += std::abs(std::cos(m * eps));
    oracle_kappa[static_cast<size_t>(m) - 1] = run / m;
  }
  const double width = (T * eps) / bins;
  std::vector<double> bin_sum(static_cast<size_t>(bins), 0.0);
  std::vector<int> bin_count(static_cast<size_t>(bins), 0);
  for (int m = 1; m <= T; ++m) {
    auto b = static_cast<std::size_t>((m * eps) / width);
    b = std::min(b, static_cast<std::size_t>(bins - 1));
    bin_sum[b] += oracle_kappa[static_cast<size_t>(m) - 1];
    bin_count[b] += 1;
  }
  double best = 1e300, best_tau = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (bin_count[static_cast<size_t>(b)] == 0) continue;
    const double avg = bin_sum[static_cast<size_t>(b)] / bin_count[static_cast<size_t>(b)];
    if (avg < best) {
      best = avg;
      best_tau = (b + 0.5) * width;
    }
  }
  CHECK(std::abs(est.tau - best_tau) <= width + 1e-12);

  // T_next translates tau through the median stepsize and respects bounds.
  CHECK(est.T_next >= 1);
  CHECK(est.T_next <= 100);
  CHECK(est.T_next == std::clamp(static_cast<int>(std::ceil(est.tau / eps)), 1, 100));
}

TEST_CASE("no distinct pair leaves tau and T unchanged") {
  LeapfrogStep step(zero_gradient());
  RandomStream rng(53);
  std::vector<PhaseState> cloud(6, {Vector::Zero(2), Vector::Ones(2)});
  const std::vector<double> eps(6, 0.3);
  const auto est = estimate_tau(step, cloud, eps, 10, 50, 20, rng);
  CHECK(!est.updated);
  CHECK(est.T_next == 10);
}

TEST_CASE("T_next never leaves [1, T_max]") {
  LeapfrogStep step(zero_gradient());
  RandomStream rng(54);
  const auto cloud = integer_cloud(12, rng);
  // Tiny stepsizes force tau/median to a large value that must be clipped.
  const std::vector<double> eps(12, 1e-4);
  const auto est = estimate_tau(step, cloud, eps, 10, 7, 10, rng);
  REQUIRE(est.updated);
  CHECK(est.T_next >= 1);
  CHECK(est.T_next <= 7);
}
