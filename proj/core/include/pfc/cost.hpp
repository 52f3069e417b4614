#pragma once

#include "pfc/geometry.hpp"

namespace pfc {

/// Tracking cost J = kappa1/2 int_Q |theta - theta_Q|^2 + kappa2/2 int_Omega |phi(T) - phi_Omega|^2.
/// int_Q uses the trapezoid weights in time; every consumer (cost, directional
/// derivative, adjoint sources) shares that rule.
struct CostSpec {
    double kappa1 = 1.0;
    double kappa2 = 0.0;
    SpaceTimeField theta_Q;  // one field per time node
    Field phi_Omega;

    static CostSpec zeros(const SpatialGrid& grid, const TimeGrid& tgrid, double kappa1, double kappa2);

    void validate(const SpatialGrid& grid, const TimeGrid& tgrid) const;
};

}  // namespace pfc
