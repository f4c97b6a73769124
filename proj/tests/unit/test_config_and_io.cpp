#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "snippet_smc/engine.hpp"
#include "snippet_smc/filamentary_model.hpp"
#include "snippet_smc/run_config.hpp"
#include "snippet_smc/trace_io.hpp"

using namespace snippet_smc;

TEST_CASE("run config round trip with defaults") {
  const std::string text = R"({
    "model": {"type": "gaussian", "variances": [1.0], "likelihood_precisions": [1.0]},
    "N": 64, "T": 8,
    "epsilon": {"fixed": 0.1},
    "seed": 42
  })";
  const auto cfg = parse_run_config(text);
  CHECK(cfg.engine.n_particles == 64);
  CHECK(cfg.engine.T == 8);
  CHECK(cfg.engine.ess_target == 0.8);
  CHECK(cfg.engine.epsilon.fixed.size() == 1);
  CHECK(!cfg.engine.epsilon.adaptive);
  CHECK(cfg.engine.seed == 42);
  CHECK(cfg.replications == 1);
}

TEST_CASE("config errors name the offending field") {
  const auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      parse_run_config(text);
      FAIL("expected a config error for ", field);
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  expect_field(R"({"model": {"type": "gaussian", "variances": [1]}})", "N");
  expect_field(R"({"model": {"type": "nope"}, "N": 8, "T": 2})", "model.type");
  expect_field(R"({"model": {"type": "gaussian", "variances": [1]}, "N": 8, "T": 2,
                   "epsilon": {}})", "epsilon");
  expect_field(R"({"model": {"type": "logistic"}, "N": 8, "T": 2})", "data");
  expect_field("{ not json", "config");
}

TEST_CASE("adaptive epsilon and tau blocks parse") {
  const std::string text = R"({
    "model": {"type": "gaussian", "variances": [1.0]},
    "N": 16, "adapt_tau": true, "T_max": 40,
    "epsilon": {"adaptive": {"theta0": 0.01, "skewness": 3.0}},
    "mixture_proportions": [1.0]
  })";
  const auto cfg = parse_run_config(text);
  CHECK(cfg.engine.adapt_tau);
  CHECK(cfg.engine.T == 40);
  CHECK(cfg.engine.T_max == 40);
  CHECK(cfg.engine.epsilon.adaptive);
  CHECK(cfg.engine.epsilon.theta0 == 0.01);
}

TEST_CASE("assembled gaussian config runs end to end deterministically") {
  const std::string text = R"({
    "model": {"type": "gaussian", "variances": [1.0], "likelihood_precisions": [1.0]},
    "N": 32, "T": 4,
    "epsilon": {"fixed": 0.2},
    "seed": 9
  })";
  setenv("SNIPPET_SMC_FIXED_CLOCK", "1", 1);
  const auto cfg = parse_run_config(text);
  const auto run_once = [&] {
    const auto parts = assemble(cfg);
    SnippetSmcEngine engine(parts.family, parts.integrators, cfg.engine);
    return trace_csv_string(engine.run().records);
  };
  CHECK(run_once() == run_once());
  unsetenv("SNIPPET_SMC_FIXED_CLOCK");
}

TEST_CASE("missing data file raises an error naming the path") {
  const std::string text = R"({
    "model": {"type": "logistic", "data": "/nonexistent/sonar.csv"},
    "N": 8, "T": 2, "epsilon": {"fixed": 0.1}
  })";
  const auto cfg = parse_run_config(text);
  try {
    assemble(cfg);
    FAIL("expected a load failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/sonar.csv") != std::string::npos);
  }
}

TEST_CASE("filamentary config anneals the tolerance end to end") {
  const std::string text = R"({
    "model": {"type": "filamentary",
              "variances": [1.0, 0.1, 1.0, 0.1],
              "c": 4.0,
              "tolerance": {"final": 0.05}},
    "N": 128, "T": 10,
    "epsilon": {"fixed": [0.05, 0.1]},
    "mixture_proportions": [0.8, 0.2],
    "seed": 12
  })";
  const auto cfg = parse_run_config(text);
  const auto parts = assemble(cfg);
  SnippetSmcEngine engine(parts.family, parts.integrators, cfg.engine);
  const auto result = engine.run();
  CHECK(result.cloud.gamma == 1.0);

  // Every surviving particle sits inside the final tolerance shell.
  const auto* family = dynamic_cast<const FilamentaryFamily*>(parts.family.get());
  REQUIRE(family != nullptr);
  for (const auto& z : result.cloud.states)
    CHECK(std::abs(family->target().constraint(z.x)) <= 0.05 + 1e-12);
}

TEST_CASE("summary json carries the documented fields") {
  const std::string text = R"({
    "model": {"type": "gaussian", "variances": [1.0], "likelihood_precisions": [1.0]},
    "N": 16, "T": 3, "epsilon": {"fixed": 0.2}, "seed": 4
  })";
  const auto cfg = parse_run_config(text);
  const auto parts = assemble(cfg);
  SnippetSmcEngine engine(parts.family, parts.integrators, cfg.engine);
  const auto result = engine.run();
  const auto json = summary_json_string(result);
  for (const char* key : {"log_z", "posterior_mean", "iterations", "gradient_evaluations",
                          "theta_final"})
    CHECK(json.find(key) != std::string::npos);
}
