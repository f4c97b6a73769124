#include <doctest.h>

#include <cmath>
#include <vector>

#include "snippet_smc/gamma_schedule.hpp"
#include "snippet_smc/random_stream.hpp"

using namespace snippet_smc;

TEST_CASE("identical likelihood values finish the schedule at once") {
  const std::vector<double> ll(10, -3.2);
  CHECK(next_gamma(ll, 0.1, 0.8) == 1.0);
}

TEST_CASE("chi at gamma_n is one by construction") {
  // ESS at gamma = gamma_n equals N for any weights, so any target ratio
  // below one is satisfiable at least at gamma_n.
  const std::vector<double> ll{-1.0, -2.0, -7.0, 0.5};
  const double g = next_gamma(ll, 0.3, 0.999999);
  CHECK(g >= 0.3);
  CHECK(g <= 1.0);
}

TEST_CASE("two-particle ESS has a closed form the bisection must match") {
  // Particles with loglik 0 and log(u): ESS(d) = (1 + u^d)^2 / (1 + u^2d)
  // for d = gamma - gamma_n. Solve ESS(d) = 2 alpha by bisection on the
  // closed form and compare against next_gamma.
  const double u = 0.02;
  const double alpha = 0.8;
  const std::vector<double> ll{0.0, std::log(u)};
  const auto ess = [&](double d) {
    const double w = std::pow(u, d);
    return (1.0 + w) * (1.0 + w) / (1.0 + w * w);
  };
  double lo = 0.0, hi = 1.0;
  if (ess(1.0) >= 2.0 * alpha) {
    lo = hi = 1.0;
  } else {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (ess(mid) >= 2.0 * alpha) lo = mid;
      else hi = mid;
    }
  }
  const double expected = lo;
  const double got = next_gamma(ll, 0.0, alpha, 1e-10);
  CHECK(got == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("the output always moves forward and never passes one") {
  RandomStream rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> ll(50);
    for (auto& v : ll) v = -5.0 * rng.uniform();
    const double g0 = 0.7 * rng.uniform();
    const double g = next_gamma(ll, g0, 0.8);
    CHECK(g > g0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("degenerate inputs finish the schedule") {
  CHECK(next_gamma(std::vector<double>{-1.0}, 0.0, 0.8) == 1.0);
  CHECK(next_gamma(std::vector<double>{}, 0.0, 0.8) == 1.0);
}
