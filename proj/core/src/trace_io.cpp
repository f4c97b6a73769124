#include "snippet_smc/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace snippet_smc {

namespace {

// Shortest round-trippable decimal form; locale independent.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trace_csv_string(const std::vector<IterationRecord>& records) {
  std::ostringstream out;
  out << "iter,gamma,theta,T,tau,logZ_inc,logZ_cum,ess_unfolded,ess_seed,median_eps,wall_ms\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << fmt(r.gamma) << ',' << fmt(r.theta) << ',' << r.T << ','
        << fmt(r.tau) << ',' << fmt(r.log_z_increment) << ',' << fmt(r.log_z_cumulative)
        << ',' << fmt(r.ess_unfolded) << ',' << fmt(r.ess_seed) << ','
        << fmt(r.median_epsilon) << ',' << fmt(r.wall_ms) << '\n';
  }
  return out.str();
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open '" + path + "'");
  out << trace_csv_string(records);
}

std::string summary_json_string(const RunResult& result) {
  nlohmann::json j;
  j["log_z"] = result.log_z;
  j["posterior_mean"] =
      std::vector<double>(result.posterior_mean.data(),
                          result.posterior_mean.data() + result.posterior_mean.size());
  j["posterior_mean_ess"] = result.posterior_mean_ess;
  j["iterations"] = result.records.size();
  j["gradient_evaluations"] = result.gradient_evaluations;
  j["theta_final"] = result.theta_final;
  j["gamma_final"] = result.cloud.gamma;
  return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const RunResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_summary_json: cannot open '" + path + "'");
  out << summary_json_string(result);
}

}  // namespace snippet_smc
