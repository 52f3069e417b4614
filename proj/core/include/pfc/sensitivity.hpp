#pragma once

#include "pfc/cost.hpp"
#include "pfc/state.hpp"

namespace pfc {

/// Directional derivative (Theta, Theta_Gamma, Phi) of the discrete
/// control-to-state map. Starts from zero.
struct SensitivityTrajectory {
    SpaceTimeField Theta;
    BoundarySpaceTimeField Theta_gamma;
    SpaceTimeField Phi;
};

/// Replays every substep and sweep recorded in `state`, applying the exact
/// Jacobian of each discrete equation, with source alpha m h in the boundary rows.
SensitivityTrajectory solve_linearized(const StateTrajectory& state, const SpatialGrid& grid,
                                       const TimeGrid& tgrid, const PhysicalParams& params,
                                       const PotentialSpec& potential, const BoundaryControl& h);

/// kappa1 int_Q (theta - theta_Q) Theta + kappa2 int_Omega (phi(T) - phi_Omega) Phi(T).
double directional_cost_derivative(const StateTrajectory& state, const SensitivityTrajectory& sens,
                                   const CostSpec& cost, const SpatialGrid& grid,
                                   const TimeGrid& tgrid);

}  // namespace pfc
