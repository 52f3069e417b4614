#pragma once

// Discrete operators shared by the forward, linearized and adjoint solvers.
// Lumped mass M (trapezoid weights), stiffness A, lumped boundary mass B
// (boundary weights embedded on the full grid).
//
//   phi-substep:   M(phi - phi_s)/dt + sigma A phi + M beta(phi)
//                    = M (theta_lag lambda(phi_s) - pi(phi_s))
//   theta-substep: M(theta - theta_s)/dt + A theta + M lambda(phi)(phi - phi_s)/dt
//                    + tau B (theta - theta_s)/dt + alpha B theta = alpha B (m u)

#include "pfc/errors.hpp"
#include "pfc/geometry.hpp"
#include "pfc/potentials.hpp"
#include "pfc/state.hpp"

#include <Eigen/SparseCholesky>

#include <map>
#include <memory>

namespace pfc::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Ldlt = Eigen::SimplicialLDLT<SpMat>;

class Scheme {
public:
    Scheme(const SpatialGrid& grid, const PhysicalParams& params, Nonlinearity nonlin)
        : grid_(grid),
          params_(params),
          nonlin_(std::move(nonlin)),
          mass_(Eigen::Map<const Field>(grid.interior_weights().data(),
                                        static_cast<Eigen::Index>(grid.size()))),
          stiffness_(stiffness_matrix(grid)) {
        Field bw(grid.boundary_size());
        for (std::size_t b = 0; b < grid.boundary_size(); ++b) bw[b] = grid.boundary_weights()[b];
        bmass_ = embed(grid, bw);
        control_weight_ = embed(grid, bw.cwiseProduct(params.m));
    }

    const SpatialGrid& grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    const Nonlinearity& nonlin() const { return nonlin_; }
    const Field& mass() const { return mass_; }
    const Field& bmass() const { return bmass_; }
    /// B m, embedded: the weight of the control in the theta rows.
    const Field& control_weight() const { return control_weight_; }
    const SpMat& stiffness() const { return stiffness_; }

    Field stiff(const Field& f) const { return stiffness_ * f; }

    /// Factorization of M/dt + A + (tau/dt + alpha) B, cached per dt.
    const Ldlt& theta_solver(double dt) {
        auto it = theta_cache_.find(dt);
        if (it != theta_cache_.end()) return *it->second;
        SpMat T = stiffness_;
        Field d = mass_ / dt + (params_.tau / dt + params_.alpha) * bmass_;
        for (Eigen::Index i = 0; i < d.size(); ++i) T.coeffRef(i, i) += d[i];
        auto solver = std::make_unique<Ldlt>(T);
        if (solver->info() != Eigen::Success) {
            throw SolverError("theta-substep factorization failed");
        }
        return *theta_cache_.emplace(dt, std::move(solver)).first->second;
    }

    /// sigma A + diag(M/dt + M beta'(phi)).
    SpMat phi_jacobian(double dt, const Field& phi) const {
        SpMat J = params_.sigma * stiffness_;
        for (Eigen::Index i = 0; i < phi.size(); ++i) {
            J.coeffRef(i, i) += mass_[i] * (1.0 / dt + nonlin_.beta_prime(phi[i]));
        }
        return J;
    }

    Ldlt& phi_solver() { return phi_solver_; }
    bool phi_pattern_ready = false;

private:
    const SpatialGrid& grid_;
    PhysicalParams params_;
    Nonlinearity nonlin_;
    Field mass_;
    Field bmass_;
    Field control_weight_;
    SpMat stiffness_;
    std::map<double, std::unique_ptr<Ldlt>> theta_cache_;
    Ldlt phi_solver_;
};

inline Field factor_solve(Ldlt& solver, const SpMat& J, const Field& rhs, bool& pattern_ready) {
    if (!pattern_ready) {
        solver.analyzePattern(J);
        pattern_ready = true;
    }
    solver.factorize(J);
    if (solver.info() != Eigen::Success) throw SolverError("phi Jacobian factorization failed");
    Field x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw SolverError("phi Jacobian solve failed");
    return x;
}

}  // namespace pfc::detail
