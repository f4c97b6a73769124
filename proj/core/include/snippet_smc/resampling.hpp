#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snippet_smc/random_stream.hpp"

namespace snippet_smc {

enum class ResamplingKind { multinomial, systematic };

/// N iid categorical draws proportional to exp(log_weights - max).
/// Throws std::domain_error when every weight is -inf.
std::vector<std::size_t> resample_multinomial(std::span<const double> log_weights,
                                              std::size_t n, RandomStream& rng);

/// Systematic resampling on the same weights; provided behind a config
/// switch, not used by the folded/unfolded equivalence machinery.
std::vector<std::size_t> resample_systematic(std::span<const double> log_weights,
                                             std::size_t n, RandomStream& rng);

std::vector<std::size_t> resample(ResamplingKind kind, std::span<const double> log_weights,
                                  std::size_t n, RandomStream& rng);

}  // namespace snippet_smc
