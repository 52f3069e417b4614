#pragma once

#include "pfc/geometry.hpp"

namespace pfc {

// Discrete Bochner norms built from the grid quadrature. Space: H = L2(Omega)
// with lumped mass, V = H1 with the stiffness form. Time: trapezoid weights,
// sup over time nodes, or forward differences for time derivatives.

double norm_h(const SpatialGrid& grid, const Field& f);
double norm_v(const SpatialGrid& grid, const Field& f);

double norm_l2_h(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& f);
double norm_l2_v(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& f);
double norm_linf_h(const SpatialGrid& grid, const SpaceTimeField& f);
double norm_linf_v(const SpatialGrid& grid, const SpaceTimeField& f);
/// sqrt(||f||^2_{L2(H)} + ||d_t f||^2_{L2(H)}).
double norm_h1_h(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& f);
double norm_l2_sigma(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundarySpaceTimeField& g);

/// ||Theta||_{L2(Q)} + ||1*Theta||_{L_inf(V)} + ||Theta_G||_{L2(Sigma)}
///   + ||Phi||_{C(H)} + ||Phi||_{L2(V)}
double norm_y(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& theta,
              const BoundarySpaceTimeField& theta_gamma, const SpaceTimeField& phi);

/// ||theta||_{L_inf(H)} + ||1*theta||_{L_inf(V)} + ||theta_G||_{L2(Sigma)}
///   + ||phi||_{H1(H)} + ||phi||_{L_inf(V)}
double norm_contdep(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& theta,
                    const BoundarySpaceTimeField& theta_gamma, const SpaceTimeField& phi);

SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b);

}  // namespace pfc
