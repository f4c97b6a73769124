#pragma once

#include <string>
#include <vector>

#include "snippet_smc/engine.hpp"

namespace snippet_smc {

/// Trace CSV, one row per iteration, RFC-4180 quoting (the values here never
/// need quotes), header:
/// iter,gamma,theta,T,tau,logZ_inc,logZ_cum,ess_unfolded,ess_seed,median_eps,wall_ms
void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& records);

std::string trace_csv_string(const std::vector<IterationRecord>& records);

/// Summary JSON: final logZ, per-coordinate posterior mean, iteration count,
/// total gradient evaluations, final theta.
void write_summary_json(const std::string& path, const RunResult& result);

std::string summary_json_string(const RunResult& result);

}  // namespace snippet_smc
