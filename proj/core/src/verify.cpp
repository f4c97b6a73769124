#include "snippet_smc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "snippet_smc/engine.hpp"
#include "snippet_smc/epsilon_adaptation.hpp"
#include "snippet_smc/estimators.hpp"
#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/math_util.hpp"
#include "snippet_smc/oracles.hpp"
#include "snippet_smc/tau_adaptation.hpp"

namespace snippet_smc {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// Golden-section minimizer, used as the independent route against the
// closed-form inverse-Gaussian fit.
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while ((b - a) > rel_tol * (std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<Snippet> random_gaussian_snippets(int n, int T, RandomStream& rng) {
  auto target = std::make_shared<const GaussianTarget>(Vector::Constant(1, 1.0));
  const ExactGaussianFlowStep step(target);
  std::vector<Snippet> snippets;
  for (int i = 0; i < n; ++i) {
    Snippet s;
    s.epsilon = 0.3;
    s.states.resize(static_cast<size_t>(T) + 1);
    s.log_mu_next.resize(T + 1);
    s.states[0] = {Vector::Constant(1, rng.normal()), Vector::Constant(1, rng.normal())};
    StepContext ctx;
    for (int k = 0; k <= T; ++k) {
      if (k > 0)
        s.states[static_cast<size_t>(k)] =
            step.step(s.epsilon, s.states[static_cast<size_t>(k) - 1], ctx);
      // A deliberately lopsided weight profile exercises the resampling law.
      s.log_mu_next[k] = -0.5 * s.states[static_cast<size_t>(k)].x.squaredNorm() +
                         0.3 * rng.normal();
    }
    s.log_mu_prev_seed = -0.5 * s.states[0].x.squaredNorm();
    s.log_w = s.log_mu_next.array() - s.log_mu_prev_seed;
    snippets.push_back(std::move(s));
  }
  return snippets;
}

CheckResult check_rao_blackwell(RandomStream& rng) {
  CheckResult r{"rao-blackwell folded/unfolded equivalence", true, ""};
  double worst = 0.0;
  const auto f = [](const PhaseState& z) { return z.x[0]; };
  for (int n = 1; n <= 3; ++n)
    for (int T = 1; T <= 2; ++T) {
      const auto snippets = random_gaussian_snippets(n, T, rng);
      worst = std::max(worst, rao_blackwell_oracle(snippets, f));
    }
  r.pass = worst <= 1e-12;
  r.detail = "max discrepancy " + fmt(worst);
  return r;
}

CheckResult check_negative_control(RandomStream& rng) {
  CheckResult r{"negative control (injected weight-sign bug is detected)", true, ""};
  const auto clean = random_gaussian_snippets(3, 2, rng);
  // Simulate a sign bug in the folded path only: a consistent bug on both
  // sides would cancel, since the identity is pure resampling bookkeeping.
  auto corrupted = clean;
  corrupted[1].log_w = -corrupted[1].log_w;
  const double disc = rao_blackwell_discrepancy(
      clean, corrupted, [](const PhaseState& z) { return z.x[0]; });
  r.pass = disc > 1e-9;
  r.detail = "discrepancy under corruption " + fmt(disc);
  return r;
}

CheckResult check_variance_decomposition(RandomStream& rng) {
  CheckResult r{"variance decomposition identity", true, ""};
  auto target = std::make_shared<const GaussianTarget>(Vector::Constant(1, 1.0));
  const ExactGaussianFlowStep step(target);
  const auto sample_mu = [&](RandomStream& s) {
    return PhaseState{Vector::Constant(1, s.normal()), Vector::Constant(1, s.normal())};
  };
  const auto log_mu = [&](const PhaseState& z) {
    return -0.5 * z.x.squaredNorm() - 0.5 * z.v.squaredNorm();
  };
  const auto vd = variance_decomposition_check(
      step, std::numbers::pi / 32.0, 16, sample_mu, log_mu,
      [](const PhaseState& z) { return z.x[0]; }, 20000, rng, 50);
  const bool identity = std::abs(vd.identity_gap) <= 3.0 * vd.identity_se;
  const bool reduction = vd.reduction_gap + 3.0 * vd.reduction_se < 0.0;
  r.pass = identity && reduction;
  r.detail = "gap " + fmt(vd.identity_gap) + " (se " + fmt(vd.identity_se) + "), between-term " +
             fmt(vd.term_between) + " vs var " + fmt(vd.var_direct);
  return r;
}

CheckResult check_ig_fit(RandomStream& rng) {
  CheckResult r{"inverse-Gaussian fit vs numeric minimizer", true, ""};
  double worst = 0.0;
  for (double s : {1.0, 3.0}) {
    for (int rep = 0; rep < 40; ++rep) {
      const int n = 3 + static_cast<int>(rng.uniform_index(20));
      std::vector<double> eps(static_cast<size_t>(n)), v(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        eps[static_cast<size_t>(i)] = std::exp(2.0 * rng.normal() - 1.0);
        v[static_cast<size_t>(i)] = std::abs(rng.normal());
      }
      const double closed = fit_epsilon_distribution(eps, v, s, 1.0);
      const auto nll = [&](double theta) {
        double total = 0.0;
        const EpsilonDistribution nu{theta, s};
        for (std::size_t i = 0; i < eps.size(); ++i) total -= v[i] * nu.log_density(eps[i]);
        return total;
      };
      const double numeric = golden_section(nll, 1e-4 * closed, 1e4 * closed, 1e-12);
      worst = std::max(worst, std::abs(closed - numeric) / closed);
    }
  }
  // Point mass: theta = eps0 (1 + sqrt 5)/2 at s = 3.
  const double point = fit_epsilon_distribution(std::vector<double>{0.37, 0.37},
                                                std::vector<double>{1.0, 2.0}, 3.0, 1.0);
  const double expected = 0.37 * (1.0 + std::sqrt(5.0)) / 2.0;
  const bool point_ok = std::abs(point - expected) <= 1e-12;
  r.pass = worst <= 1e-6 && point_ok;
  r.detail = "max rel err " + fmt(worst) + ", point-mass err " + fmt(std::abs(point - expected));
  return r;
}

CheckResult check_free_particle_kappa(RandomStream& rng) {
  CheckResult r{"free-particle contraction coefficients", true, ""};
  // Zero-gradient model: integer-valued states keep the arithmetic exact.
  PositionTarget flat;
  flat.log_density_and_grad = [](const Vector& x, double& lp, Vector& g) {
    lp = 0.0;
    g = Vector::Zero(x.size());
  };
  const LeapfrogStep step(flat);
  std::vector<PhaseState> particles;
  std::vector<double> eps;
  for (int i = 0; i < 8; ++i) {
    Vector x(2), v(2);
    for (int j = 0; j < 2; ++j) {
      x[j] = static_cast<double>(rng.uniform_index(9)) - 4.0;
      v[j] = static_cast<double>(rng.uniform_index(5)) - 2.0;
    }
    particles.push_back({x, v});
    eps.push_back(0.5);
  }
  const auto est = estimate_tau(step, particles, eps, 12, 64, 20, rng);
  bool exact = est.updated;
  for (const auto& curve : est.data.kappa)
    for (std::size_t m = 0; m < curve.size(); ++m) {
      const double expected =
          (static_cast<double>(m) + 2.0) / (static_cast<double>(m) + 1.0);
      if (curve[m] != expected) exact = false;
    }
  r.pass = exact;
  r.detail = exact ? "kappa_{j,m} = (m+1)/m exactly" : "mismatch found";
  return r;
}

CheckResult check_gaussian_evidence(std::uint64_t seed) {
  CheckResult r{"1-D Gaussian evidence", true, ""};
  auto target = std::make_shared<const GaussianTarget>(Vector::Constant(1, 1.0),
                                                       Vector::Constant(1, 1.0));
  auto family = std::make_shared<const TemperedFamily>(target);
  EngineConfig cfg;
  cfg.n_particles = 64;
  cfg.T = 8;
  cfg.epsilon.fixed = {0.1};
  cfg.ess_target = 0.8;
  std::vector<double> z_hat;
  for (int rep = 0; rep < 50; ++rep) {
    cfg.seed = seed + static_cast<std::uint64_t>(rep);
    SnippetSmcEngine engine(family, {leapfrog_integrator(family)}, cfg);
    z_hat.push_back(std::exp(engine.run().log_z));
  }
  const auto ms = mean_and_se(z_hat);
  const double truth = std::exp(target->log_evidence(1.0));
  r.pass = std::abs(ms.mean - truth) <= 3.0 * ms.se;
  r.detail = "mean Z " + fmt(ms.mean) + " vs " + fmt(truth) + " (se " + fmt(ms.se) + ")";
  return r;
}

}  // namespace

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
  RandomStream root(seed);
  std::vector<CheckResult> results;
  {
    RandomStream rng = root.substream(1);
    results.push_back(check_rao_blackwell(rng));
  }
  {
    RandomStream rng = root.substream(2);
    results.push_back(check_negative_control(rng));
  }
  {
    RandomStream rng = root.substream(3);
    results.push_back(check_variance_decomposition(rng));
  }
  {
    RandomStream rng = root.substream(4);
    results.push_back(check_ig_fit(rng));
  }
  {
    RandomStream rng = root.substream(5);
    results.push_back(check_free_particle_kappa(rng));
  }
  results.push_back(check_gaussian_evidence(seed));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace snippet_smc
