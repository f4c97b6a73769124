#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "snippet_smc/filamentary_model.hpp"
#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/logistic_model.hpp"

using namespace snippet_smc;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string sixty_zeros_row(const std::string& label) {
  std::string row;
  for (int i = 0; i < 60; ++i) row += "0.0,";
  return row + label + "\n";
}

}  // namespace

TEST_CASE("load_sonar rejects an empty file") {
  const auto path = write_temp("sonar_empty.csv", "");
  CHECK_THROWS_AS(load_sonar(path.string()), std::runtime_error);
}

TEST_CASE("load_sonar prepends the intercept and maps labels") {
  const auto path = write_temp("sonar_one.csv", sixty_zeros_row("R"));
  const auto target = load_sonar(path.string());
  CHECK(target.n_observations() == 1);
  CHECK(target.dimension() == 61);
  CHECK(target.design()(0, 0) == 1.0);
  for (int j = 1; j < 61; ++j) CHECK(target.design()(0, j) == 0.0);
  CHECK(target.labels()[0] == 1.0);
  CHECK(target.prior_scales()[0] == 20.0);
  CHECK(target.prior_scales()[1] == 5.0);

  const auto path_m = write_temp("sonar_one_m.csv", sixty_zeros_row("M"));
  CHECK(load_sonar(path_m.string()).labels()[0] == -1.0);
}

TEST_CASE("load_sonar names the offending line") {
  const auto path = write_temp("sonar_bad.csv", sixty_zeros_row("R") + "1.0,2.0,R\n");
  try {
    load_sonar(path.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("logistic log likelihood at zero and saturation") {
  const auto path = write_temp("sonar_two.csv", sixty_zeros_row("R") + sixty_zeros_row("M"));
  const auto target = load_sonar(path.string());
  CHECK(target.log_likelihood(Vector::Zero(61)) ==
        doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-14));

  // Single observation with margin +50: essentially zero.
  Matrix design(1, 1);
  design << 1.0;
  Vector y(1);
  y << 1.0;
  LogisticRegressionTarget single(design, y, Vector::Constant(1, 5.0));
  const double ll = single.log_likelihood(Vector::Constant(1, 50.0));
  CHECK(ll == doctest::Approx(-std::log1p(std::exp(-50.0))).epsilon(1e-12));
  CHECK(std::abs(ll) < 2e-22);
}

TEST_CASE("logistic likelihood equals the brute-force product") {
  RandomStream rng(31);
  Matrix design(5, 3);
  Vector y(5);
  for (int i = 0; i < 5; ++i) {
    y[i] = (rng.uniform() < 0.5) ? 1.0 : -1.0;
    for (int j = 0; j < 3; ++j) design(i, j) = rng.normal();
  }
  LogisticRegressionTarget target(design, y, Vector::Constant(3, 5.0));
  for (int rep = 0; rep < 20; ++rep) {
    Vector x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.normal();
    double direct = 0.0;
    for (int i = 0; i < 5; ++i)
      direct += std::log(1.0 / (1.0 + std::exp(-y[i] * design.row(i).dot(x))));
    CHECK(target.log_likelihood(x) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("logistic likelihood is concave along random sections") {
  RandomStream rng(32);
  Matrix design(12, 4);
  Vector y(12);
  for (int i = 0; i < 12; ++i) {
    y[i] = (rng.uniform() < 0.5) ? 1.0 : -1.0;
    for (int j = 0; j < 4; ++j) design(i, j) = rng.normal();
  }
  LogisticRegressionTarget target(design, y, Vector::Constant(4, 5.0));
  for (int rep = 0; rep < 25; ++rep) {
    Vector x0(4), dir(4);
    for (int j = 0; j < 4; ++j) {
      x0[j] = rng.normal();
      dir[j] = rng.normal();
    }
    const double h = 1e-3;
    const double second = target.log_likelihood(x0 + h * dir) -
                          2.0 * target.log_likelihood(x0) +
                          target.log_likelihood(x0 - h * dir);
    CHECK(second <= 1e-9);
  }
}

TEST_CASE("exact Gaussian flow: identity, period, energy, flow property") {
  GaussianTarget target((Vector(3) << 1.0, 0.25, 9.0).finished());
  RandomStream rng(8);
  Vector x(3), v(3);
  for (int i = 0; i < 3; ++i) {
    x[i] = rng.normal();
    v[i] = rng.normal();
  }
  const PhaseState z{x, v};

  const auto id = exact_gaussian_flow(target, 0.0, z);
  CHECK((id.x - z.x).norm() == 0.0);
  CHECK((id.v - z.v).norm() == 0.0);

  GaussianTarget unit(Vector::Constant(2, 1.0));
  const PhaseState z2{Vector::Constant(2, 0.7), Vector::Constant(2, -0.3)};
  const auto per = exact_gaussian_flow(unit, 2.0 * std::numbers::pi, z2);
  CHECK((per.x - z2.x).norm() <= 1e-12);
  CHECK((per.v - z2.v).norm() <= 1e-12);

  for (double t : {0.17, 1.3, 11.0}) {
    const auto zt = exact_gaussian_flow(target, t, z);
    CHECK(target.hamiltonian(zt) ==
          doctest::Approx(target.hamiltonian(z)).epsilon(1e-12));
  }

  const auto a = exact_gaussian_flow(target, 0.9, exact_gaussian_flow(target, 1.7, z));
  const auto b = exact_gaussian_flow(target, 2.6, z);
  CHECK((a.x - b.x).norm() <= 1e-10);
  CHECK((a.v - b.v).norm() <= 1e-10);
}

TEST_CASE("filamentary density is symmetric under x -> -x and gated by tolerance") {
  FilamentaryTarget target((Vector(3) << 1.0, 0.1, 1.0).finished(), 3.0);
  RandomStream rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.normal();
    CHECK(target.log_density(0.8, x) == target.log_density(0.8, -x));
    CHECK(target.constraint(x) == doctest::Approx(target.constraint(-x)).epsilon(1e-14));
  }
  // A point exactly on the shell is inside for any tolerance.
  Vector on(3);
  on << std::sqrt(3.0), 0.0, 0.0;
  CHECK(std::isfinite(target.log_density(1e-12, on)));
  Vector off(3);
  off << 3.0, 0.0, 0.0;  // ell = 6
  CHECK(target.log_density(1.0, off) == neg_inf);
  CHECK(std::isfinite(target.log_density(7.0, off)));
}

TEST_CASE("filamentary family shrinks its tolerance geometrically") {
  auto target = std::make_shared<const FilamentaryTarget>(Vector::Constant(2, 1.0), 1.0);
  FilamentaryFamily family(target, 4.0, 0.01);
  CHECK(family.tolerance(0.0) == doctest::Approx(4.0));
  CHECK(family.tolerance(1.0) == doctest::Approx(0.01));
  CHECK(family.tolerance(0.5) == doctest::Approx(std::sqrt(4.0 * 0.01)));
  // Incremental weights: staying inside is free, leaving is fatal.
  CHECK(family.log_incremental(0.0, 0.5, 0.1) == 0.0);
  CHECK(family.log_incremental(0.0, 1.0, 0.1) == neg_inf);
}
