#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "snippet_smc/engine.hpp"
#include "snippet_smc/logistic_model.hpp"
#include "snippet_smc/run_config.hpp"
#include "snippet_smc/trace_io.hpp"
#include "snippet_smc/verify.hpp"

namespace fs = std::filesystem;
using namespace snippet_smc;

namespace {

int run_replications(RunConfig config) {
  const auto parts = assemble(config);
  fs::create_directories(config.output_dir);
  // Replications run sequentially, each on its own substream of the seed.
  RandomStream base(config.engine.seed);
  for (int rep = 0; rep < config.replications; ++rep) {
    SnippetSmcEngine engine(parts.family, parts.integrators, config.engine);
    const RunResult result = engine.run(base.substream(static_cast<std::uint64_t>(rep)));

    std::string suffix;
    if (config.replications > 1) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "_rep%03d", rep);
      suffix = buf;
    }
    const auto trace_path = fs::path(config.output_dir) / ("trace" + suffix + ".csv");
    const auto summary_path = fs::path(config.output_dir) / ("summary" + suffix + ".json");
    write_trace_csv(trace_path.string(), result.records);
    write_summary_json(summary_path.string(), result);
    std::cout << "replication " << rep << ": logZ = " << result.log_z << ", iterations = "
              << result.records.size() << ", gradient evaluations = "
              << result.gradient_evaluations << "\n"
              << "  trace:   " << trace_path.string() << "\n"
              << "  summary: " << summary_path.string() << "\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out, std::optional<int> replications) {
  RunConfig config = load_run_config(config_path);
  if (seed) config.engine.seed = *seed;
  if (out) config.output_dir = *out;
  if (replications) config.replications = *replications;
  return run_replications(std::move(config));
}

int cmd_verify() {
  const auto results = run_verification_suite();
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results)
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
  return all_passed(results) ? 0 : 1;
}

int cmd_sonar_demo(const std::string& csv, const std::string& out,
                   std::uint64_t seed) {
  // Fixed-budget Sonar run: N(T+1) = 10000 with fixed stepsize 0.1 and an
  // ESS-driven tempering schedule.
  RunConfig config;
  config.model.kind = ModelSpec::Kind::logistic;
  config.model.data_path = csv;
  config.engine.n_particles = 500;
  config.engine.T = 19;
  config.engine.epsilon.fixed = {0.1};
  config.engine.ess_target = 0.8;
  config.engine.seed = seed;
  config.output_dir = out;
  config.replications = 1;
  return run_replications(std::move(config));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrator-snippet SMC sampler"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replications;
  auto* run = app.add_subcommand("run", "Run the sampler from a JSON config");
  run->add_option("config", config_path, "Path to the JSON run configuration")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Override the output directory");
  run->add_option("--replications", replications, "Override the replication count");

  auto* verify = app.add_subcommand("verify", "Run the oracle and invariant suite");

  std::string sonar_csv;
  std::string sonar_out = "sonar_demo_out";
  std::uint64_t sonar_seed = 42;
  auto* demo = app.add_subcommand("sonar-demo", "Fixed-budget Sonar logistic regression run");
  demo->add_option("csv", sonar_csv, "Path to the Sonar CSV file")->required();
  demo->add_option("--out", sonar_out, "Output directory");
  demo->add_option("--seed", sonar_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out, replications);
    if (verify->parsed()) return cmd_verify();
    if (demo->parsed()) return cmd_sonar_demo(sonar_csv, sonar_out, sonar_seed);
  } catch (const std::exception& e) {
    std::cerr << "snippet-smc: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
