#pragma once

#include <memory>
#include <string>
#include <vector>

#include "snippet_smc/engine.hpp"

namespace snippet_smc {

struct ModelSpec {
  enum class Kind { gaussian, logistic, filamentary };
  Kind kind = Kind::gaussian;

  // gaussian
  std::vector<double> variances = {1.0};
  std::vector<double> likelihood_precisions;  // empty: pure prior
  bool exact_flow = false;                    // use the exact flow instead of leapfrog

  // logistic
  std::string data_path;

  // filamentary
  std::vector<double> sigma_diag;
  double constraint_level = 1.0;  // c in ell(x) = x' Sigma^{-1} x - c
  double tol_initial = 0.0;       // <= 0: set from the initial cloud
  double tol_final = 1e-2;
};

struct RunConfig {
  ModelSpec model;
  EngineConfig engine;
  std::string output_dir = ".";
  int replications = 1;
};

/// Parses the JSON run configuration; parse errors carry the offending
/// field name.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Family plus integrator factories ready to drive the engine.
struct Assembled {
  std::shared_ptr<const AnnealedFamily> family;
  std::vector<IntegratorFactory> integrators;
};

/// Builds the model family and integrators a config describes. For
/// filamentary models with tol_initial <= 0 the initial tolerance is set to
/// the maximum |ell| over a pilot cloud drawn from the base distribution.
Assembled assemble(const RunConfig& config);

}  // namespace snippet_smc
