#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "snippet_smc/engine.hpp"
#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/logistic_model.hpp"
#include "snippet_smc/markov_snippet.hpp"
#include "snippet_smc/math_util.hpp"
#include "snippet_smc/random_stream.hpp"
#include "snippet_smc/tau_adaptation.hpp"

using namespace snippet_smc;

namespace {

// Synthetic logistic model shared by the heavier integration tests.
std::shared_ptr<const TemperedFamily> synthetic_logistic_family() {
  RandomStream gen(321);
  const int n_obs = 120, d = 25;
  Matrix design(n_obs, d);
  Vector labels(n_obs), coef(d);
  for (int j = 0; j < d; ++j) coef[j] = 0.6 * gen.normal();
  for (int i = 0; i < n_obs; ++i) {
    design(i, 0) = 1.0;
    for (int j = 1; j < d; ++j) design(i, j) = gen.uniform();
    const double m = design.row(i) * coef;
    labels[i] = (gen.uniform() < 1.0 / (1.0 + std::exp(-m))) ? 1.0 : -1.0;
  }
  Vector scales = Vector::Constant(d, 5.0);
  scales[0] = 20.0;
  auto target = std::make_shared<const LogisticRegressionTarget>(design, labels, scales);
  return std::make_shared<const TemperedFamily>(target);
}

}  // namespace

TEST_CASE("snippet and Markov-snippet engines agree on a 3-D Gaussian evidence") {
  // Two independent code paths for the same normalizing constant: the
  // integrator-snippet engine and the waste-free baseline must agree with
  // each other and with the closed form.
  auto target = std::make_shared<const GaussianTarget>(
      (Vector(3) << 1.0, 4.0, 0.25).finished(), (Vector(3) << 1.0, 0.5, 2.0).finished());
  auto family = std::make_shared<const TemperedFamily>(target);
  const double truth = target->log_evidence(1.0);

  std::vector<double> hs, wf;
  for (int rep = 0; rep < 60; ++rep) {
    EngineConfig cfg;
    cfg.n_particles = 64;
    cfg.T = 9;
    cfg.epsilon.fixed = {0.25};
    cfg.seed = 52000 + static_cast<std::uint64_t>(rep);
    SnippetSmcEngine engine(family, {leapfrog_integrator(family)}, cfg);
    hs.push_back(std::exp(engine.run().log_z));

    MarkovSnippetConfig mcfg;
    mcfg.n_particles = 64;
    mcfg.chain_length = 9;
    mcfg.seed = 53000 + static_cast<std::uint64_t>(rep);
    MarkovSnippetSmc smc(family, mcfg);
    wf.push_back(std::exp(smc.run().log_z));
  }
  const auto hs_ms = mean_and_se(hs);
  const auto wf_ms = mean_and_se(wf);
  const double z_truth = std::exp(truth);
  CHECK(std::abs(hs_ms.mean - z_truth) <= 3.0 * hs_ms.se);
  CHECK(std::abs(wf_ms.mean - z_truth) <= 3.0 * wf_ms.se);
  const double joint_se = std::sqrt(hs_ms.se * hs_ms.se + wf_ms.se * wf_ms.se);
  CHECK(std::abs(hs_ms.mean - wf_ms.mean) <= 3.0 * joint_se);
}

TEST_CASE("logistic contraction curves are regular and dip at an interior trough") {
  auto family = synthetic_logistic_family();
  const auto step = make_leapfrog(family, 0.5);
  RandomStream rng(54);
  const int n = 80;
  VelocityLaw vel(family->dimension());
  std::vector<PhaseState> cloud;
  for (int i = 0; i < n; ++i) {
    PhaseState z;
    z.x = Vector::Zero(family->dimension());
    for (Eigen::Index j = 0; j < z.x.size(); ++j) z.x[j] = 0.5 * rng.normal();
    z.v = vel.sample(rng);
    cloud.push_back(std::move(z));
  }
  const auto est = estimate_tau(*step, cloud, std::vector<double>(n, 0.1), 100, 200, 50, rng);
  REQUIRE(est.updated);
  REQUIRE(est.data.bin_centers.size() >= 3);
  // Every early-curve value is finite and positive.
  for (const auto& curve : est.data.kappa)
    for (std::size_t m = 0; m < 10; ++m) {
      CHECK(std::isfinite(curve[m]));
      CHECK(curve[m] > 0.0);
    }
  // The binned average locates a trough away from both grid ends.
  CHECK(est.tau > est.data.bin_centers.front());
  CHECK(est.tau < est.data.bin_centers.back());
}

TEST_CASE("full adaptation of gamma, epsilon and T runs to completion") {
  auto family = synthetic_logistic_family();
  EngineConfig cfg;
  cfg.n_particles = 128;
  cfg.T = 40;  // initial T; tau adaptation takes over afterwards
  cfg.adapt_tau = true;
  cfg.T_max = 40;
  cfg.epsilon.adaptive = true;
  cfg.epsilon.theta0 = 0.01;
  cfg.epsilon.skewness = 3.0;
  cfg.seed = 55;
  SnippetSmcEngine engine(family, {leapfrog_integrator(family)}, cfg);
  const auto result = engine.run();
  CHECK(result.cloud.gamma == 1.0);
  CHECK(result.records.size() >= 3);
  for (const auto& rec : result.records) {
    CHECK(rec.T >= 1);
    CHECK(rec.T <= cfg.T_max);
    CHECK(std::isfinite(rec.log_z_increment));
    CHECK(rec.ess_unfolded > 0.0);
  }
  // tau has been estimated at least once and the trace records it.
  CHECK(result.records.back().tau > 0.0);
  CHECK(result.theta_final > 1e-4);
  CHECK(result.theta_final < 10.0);
  CHECK(std::isfinite(result.log_z));
}
