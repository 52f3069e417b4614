#pragma once

#include "pfc/cost.hpp"
#include "pfc/state.hpp"

namespace pfc {

/// Backward adjoint (p, p_Gamma, q) stored in forward time orientation.
/// p[n] belongs to step n (n = 0..N-1) and p[N] = 0; q[n] is the adjoint of
/// phi at time node n, so q[N] = kappa2 (phi(T) - phi_Omega).
struct AdjointTrajectory {
    SpaceTimeField p;
    BoundarySpaceTimeField p_gamma;
    SpaceTimeField q;
};

/// Exact transpose of solve_linearized, marched from n = N down to 0.
AdjointTrajectory solve_adjoint(const StateTrajectory& state, const SpatialGrid& grid,
                                const TimeGrid& tgrid, const PhysicalParams& params,
                                const PotentialSpec& potential, const CostSpec& cost);

/// L2(Sigma) representative of DJ: g[n] = alpha m p_Gamma[n].
BoundaryControl gradient(const AdjointTrajectory& adjoint, const PhysicalParams& params);

/// |<g, h> - DJ[h] via the linearized solve| / max(1, |<g, h>|).
double duality_gap(const StateTrajectory& state, const SpatialGrid& grid, const TimeGrid& tgrid,
                   const PhysicalParams& params, const PotentialSpec& potential,
                   const CostSpec& cost, const BoundaryControl& h);

}  // namespace pfc
