#pragma once

#include "pfc/adjoint.hpp"
#include "pfc/cost.hpp"
#include "pfc/state.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pfc {

struct ControlBounds {
    BoundaryControl u_min;
    BoundaryControl u_max;

    static ControlBounds constant(const SpatialGrid& grid, const TimeGrid& tgrid, double lo, double hi);

    /// Throws InvalidArgument unless u_min <= u_max everywhere.
    void validate(const SpatialGrid& grid, const TimeGrid& tgrid) const;
};

/// Forward model at fixed data; maps a control to its state, cost and gradient.
class ControlProblem {
public:
    ControlProblem(SpatialGrid grid, TimeGrid tgrid, PhysicalParams params, PotentialSpec potential,
                   std::optional<Regularization> regularization, InitialData init,
                   SolverOptions options = {});

    const SpatialGrid& grid() const { return grid_; }
    const TimeGrid& tgrid() const { return tgrid_; }
    const PhysicalParams& params() const { return params_; }
    const PotentialSpec& potential() const { return potential_; }
    const std::optional<Regularization>& regularization() const { return regularization_; }
    const InitialData& init() const { return init_; }
    const SolverOptions& options() const { return options_; }

    StateTrajectory solve(const BoundaryControl& u) const;

    struct Evaluation {
        StateTrajectory state;
        double cost = 0.0;
        AdjointTrajectory adjoint;
        BoundaryControl gradient;
    };
    Evaluation evaluate(const BoundaryControl& u, const CostSpec& cost) const;
    /// Adjoint and gradient for an already computed state.
    void complete(Evaluation& eval, const CostSpec& cost) const;

private:
    SpatialGrid grid_;
    TimeGrid tgrid_;
    PhysicalParams params_;
    PotentialSpec potential_;
    std::optional<Regularization> regularization_;
    InitialData init_;
    SolverOptions options_;
};

double evaluate_cost(const StateTrajectory& state, const CostSpec& cost, const SpatialGrid& grid,
                     const TimeGrid& tgrid);

/// Nodewise clamp to [u_min, u_max].
BoundaryControl project(const BoundaryControl& u, const ControlBounds& bounds);

/// ||u - P(u - g)||_{L2(Sigma)}.
double stationarity_residual(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundaryControl& u,
                             const BoundaryControl& g, const ControlBounds& bounds);

struct OptimizeOptions {
    int max_iter = 200;
    double tol = 1e-6;
    double s0 = 1.0;
    double armijo_c1 = 1e-4;
    double backtrack_ratio = 0.5;
    int backtrack_budget = 30;
};

enum class ActiveSet : std::int8_t { free = 0, lower = 1, upper = 2 };

struct CertificationReport {
    double tol_sign = 0.0;
    int pairs = 0;
    int satisfied = 0;
    double satisfied_fraction = 1.0;
    double normal_cone_residual = 0.0;
    std::vector<std::pair<int, int>> violations;  // (step, boundary node)
};

struct OptimizeReport {
    int iterations = 0;   // accepted steps
    int evaluations = 0;  // forward solves
    std::vector<double> cost_history;
    std::vector<double> residual_history;
    std::vector<double> step_history;
    BoundaryControl control;
    std::vector<std::vector<ActiveSet>> active;
    CertificationReport certification;
    bool converged = false;
    std::string termination;
};

/// Projected gradient with projection-arc Armijo backtracking.
OptimizeReport projected_gradient(const BoundaryControl& u0, const ControlBounds& bounds,
                                  const ControlProblem& problem, const CostSpec& cost,
                                  const OptimizeOptions& opts = {});

/// Sign trichotomy of m p_Gamma against the box: s < -tol needs u = u_max,
/// s > tol needs u = u_min, |s| <= tol is free. The default dead band is
/// 1e-8 (1 + max |m p_Gamma|).
CertificationReport check_optimality(const BoundaryControl& u, const AdjointTrajectory& adjoint,
                                     const PhysicalParams& params, const ControlBounds& bounds,
                                     const SpatialGrid& grid, const TimeGrid& tgrid,
                                     std::optional<double> tol_sign = std::nullopt);

}  // namespace pfc
