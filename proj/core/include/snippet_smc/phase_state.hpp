#pragma once

#include <Eigen/Dense>

namespace snippet_smc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point z = (x, v) in position-velocity phase space.
struct PhaseState {
  Vector x;
  Vector v;

  PhaseState() = default;
  PhaseState(Vector x_, Vector v_) : x(std::move(x_)), v(std::move(v_)) {}

  Eigen::Index dim() const { return x.size(); }

  bool is_finite() const { return x.allFinite() && v.allFinite(); }
};

/// Velocity flip sigma(x, v) = (x, -v); the involution that inverts
/// reversible integrators via psi^{-1} = sigma o psi o sigma.
inline PhaseState flip_velocity(const PhaseState& z) { return {z.x, -z.v}; }

}  // namespace snippet_smc
