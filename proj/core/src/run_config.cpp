#include "snippet_smc/run_config.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "snippet_smc/filamentary_model.hpp"
#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/logistic_model.hpp"

namespace snippet_smc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::runtime_error("config: field '" + field + "': " + what);
}

template <typename T>
T require(const json& j, const std::string& field) {
  if (!j.contains(field)) fail(field, "missing");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    fail(field, e.what());
  }
}

template <typename T>
T optional(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    fail(field, e.what());
  }
}

ModelSpec parse_model(const json& j) {
  ModelSpec m;
  const auto type = require<std::string>(j, "type");
  if (type == "gaussian") {
    m.kind = ModelSpec::Kind::gaussian;
    m.variances = require<std::vector<double>>(j, "variances");
    m.likelihood_precisions =
        optional<std::vector<double>>(j, "likelihood_precisions", {});
    m.exact_flow = optional<bool>(j, "exact_flow", false);
  } else if (type == "logistic") {
    m.kind = ModelSpec::Kind::logistic;
    m.data_path = require<std::string>(j, "data");
  } else if (type == "filamentary") {
    m.kind = ModelSpec::Kind::filamentary;
    m.sigma_diag = require<std::vector<double>>(j, "variances");
    m.constraint_level = require<double>(j, "c");
    const auto& tol = j.contains("tolerance") ? j.at("tolerance") : json::object();
    m.tol_initial = optional<double>(tol, "initial", 0.0);
    m.tol_final = require<double>(tol, "final");
  } else {
    fail("model.type", "unknown model '" + type + "'");
  }
  return m;
}

EpsilonSpec parse_epsilon(const json& j) {
  EpsilonSpec e;
  if (j.contains("adaptive")) {
    const auto& a = j.at("adaptive");
    e.adaptive = true;
    e.theta0 = require<double>(a, "theta0");
    e.skewness = optional<double>(a, "skewness", 3.0);
  } else if (j.contains("fixed")) {
    e.adaptive = false;
    if (j.at("fixed").is_array())
      e.fixed = require<std::vector<double>>(j, "fixed");
    else
      e.fixed = {require<double>(j, "fixed")};
  } else {
    fail("epsilon", "expected 'fixed' or 'adaptive'");
  }
  return e;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }

  RunConfig c;
  c.model = parse_model(j.contains("model") ? j.at("model") : json::object());
  c.engine.n_particles = require<int>(j, "N");
  if (j.contains("T")) c.engine.T = require<int>(j, "T");
  c.engine.adapt_tau = optional<bool>(j, "adapt_tau", false);
  if (c.engine.adapt_tau) {
    c.engine.T_max = require<int>(j, "T_max");
    if (!j.contains("T")) c.engine.T = c.engine.T_max;
  } else if (!j.contains("T")) {
    fail("T", "missing");
  }
  c.engine.T_max = optional<int>(j, "T_max", std::max(c.engine.T, c.engine.T_max));
  c.engine.tau_bins = optional<int>(j, "tau_bins", 50);
  c.engine.ess_target = optional<double>(j, "ess_target", 0.8);
  c.engine.gamma0 = optional<double>(j, "gamma0", 0.0);
  c.engine.max_iterations = optional<int>(j, "max_iterations", 1000);
  c.engine.epsilon =
      parse_epsilon(j.contains("epsilon") ? j.at("epsilon") : json::object());
  const std::vector<double> default_mixture =
      (c.model.kind == ModelSpec::Kind::filamentary) ? std::vector<double>{0.8, 0.2}
                                                     : std::vector<double>{1.0};
  c.engine.mixture_proportions =
      optional<std::vector<double>>(j, "mixture_proportions", default_mixture);
  c.engine.seed = optional<std::uint64_t>(j, "seed", 0);
  const auto resampling = optional<std::string>(j, "resampling", "multinomial");
  if (resampling == "multinomial") c.engine.resampling = ResamplingKind::multinomial;
  else if (resampling == "systematic") c.engine.resampling = ResamplingKind::systematic;
  else fail("resampling", "expected 'multinomial' or 'systematic'");
  c.output_dir = optional<std::string>(j, "output", ".");
  c.replications = optional<int>(j, "replications", 1);

  if (c.engine.n_particles < 2) fail("N", "must be >= 2");
  if (c.engine.T < 1) fail("T", "must be >= 1");
  if (!(c.engine.ess_target > 0.0 && c.engine.ess_target < 1.0))
    fail("ess_target", "must lie in (0, 1)");
  if (c.replications < 1) fail("replications", "must be >= 1");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

Assembled assemble(const RunConfig& config) {
  Assembled out;
  switch (config.model.kind) {
    case ModelSpec::Kind::gaussian: {
      Vector var = Eigen::Map<const Vector>(config.model.variances.data(),
                                            static_cast<Eigen::Index>(config.model.variances.size()));
      Vector prec;
      if (!config.model.likelihood_precisions.empty())
        prec = Eigen::Map<const Vector>(
            config.model.likelihood_precisions.data(),
            static_cast<Eigen::Index>(config.model.likelihood_precisions.size()));
      auto target = std::make_shared<const GaussianTarget>(std::move(var), std::move(prec));
      auto family = std::make_shared<const TemperedFamily>(target);
      out.family = family;
      if (config.model.exact_flow)
        out.integrators = {constant_integrator(std::make_shared<ExactGaussianFlowStep>(target))};
      else
        out.integrators = {leapfrog_integrator(family)};
      break;
    }
    case ModelSpec::Kind::logistic: {
      auto target =
          std::make_shared<const LogisticRegressionTarget>(load_sonar(config.model.data_path));
      auto family = std::make_shared<const TemperedFamily>(target);
      out.family = family;
      out.integrators = {leapfrog_integrator(family)};
      break;
    }
    case ModelSpec::Kind::filamentary: {
      Vector sigma = Eigen::Map<const Vector>(
          config.model.sigma_diag.data(),
          static_cast<Eigen::Index>(config.model.sigma_diag.size()));
      auto target = std::make_shared<const FilamentaryTarget>(std::move(sigma),
                                                              config.model.constraint_level);
      double tol0 = config.model.tol_initial;
      if (!(tol0 > 0.0)) {
        // Pilot cloud sets the initial shell so every seed starts inside.
        RandomStream pilot(config.engine.seed ^ 0x70696C6F74ull);
        double max_stat = 0.0;
        for (int i = 0; i < config.engine.n_particles; ++i) {
          const Vector x = target->sample_base(pilot);
          max_stat = std::max(max_stat, std::abs(target->constraint(x)));
        }
        tol0 = std::max(max_stat * 1.001, config.model.tol_final);
      }
      auto family =
          std::make_shared<const FilamentaryFamily>(target, tol0, config.model.tol_final);
      out.family = family;
      out.integrators = {constant_integrator(std::make_shared<ThugStep>(target)),
                         constant_integrator(std::make_shared<SnugStep>(target))};
      break;
    }
  }
  return out;
}

}  // namespace snippet_smc
