#pragma once

#include <vector>

#include "snippet_smc/integrator.hpp"
#include "snippet_smc/phase_state.hpp"
#include "snippet_smc/random_stream.hpp"

namespace snippet_smc {

/// Coupled-pair contraction curves and their binned average over effective
/// integration time tau = m * eps.
struct ContractionData {
  std::vector<std::vector<double>> tau;    // per pair j: tau_{j,m}, m = 1..T
  std::vector<std::vector<double>> kappa;  // per pair j: kappa_{j,m}
  std::vector<double> bin_centers;         // non-empty bins only
  std::vector<double> bin_kappa;           // matching averages
  double tau_selected = 0.0;
  int T_next = 0;
};

struct TauEstimationResult {
  double tau = 0.0;
  int T_next = 0;
  bool updated = false;  // false when no usable pair was found
  std::uint64_t grad_evals = 0;
  ContractionData data;
};

/// Alg.-style tau estimation: M = floor(N/2) random x-distinct pairs are
/// coupled (velocity and stepsize of the first member), integrated T_current
/// steps, and the average normalized inter-trajectory distance
///   kappa_{j,m} = m^{-1} sum_{k=0}^{m} ||x_k^1 - x_k^2|| / ||x_0^1 - x_0^2||
/// is binned over tau in `bins` equal-width bins on [0, max tau]. tau is the
/// smallest bin center attaining the minimal binned average and
/// T_next = min(T_max, ceil(tau / median(epsilons))), at least 1.
TauEstimationResult estimate_tau(const IntegratorStep& step,
                                 const std::vector<PhaseState>& particles,
                                 const std::vector<double>& epsilons, int T_current,
                                 int T_max, int bins, RandomStream& rng);

}  // namespace snippet_smc
