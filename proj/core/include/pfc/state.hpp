#pragma once

#include "pfc/geometry.hpp"
#include "pfc/potentials.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pfc {

/// sigma (interface), tau (boundary relaxation), alpha (boundary exchange) and
/// the nonnegative control aperture m on the boundary nodes.
struct PhysicalParams {
    double sigma = 1.0;
    double tau = 1.0;
    double alpha = 1.0;
    BoundaryField m;

    void validate(const SpatialGrid& grid) const;
};

/// Boundary control, piecewise constant in time: values[n] acts on step n
/// (the interval [t_n, t_{n+1}]), n = 0..N-1. The same carrier holds
/// gradients and directions.
struct BoundaryControl {
    std::vector<BoundaryField> values;

    static BoundaryControl constant(const SpatialGrid& grid, const TimeGrid& tgrid, double c);
    static BoundaryControl zeros(const SpatialGrid& grid, const TimeGrid& tgrid) {
        return constant(grid, tgrid, 0.0);
    }

    int steps() const { return static_cast<int>(values.size()); }
    BoundaryField& operator[](int n) { return values[n]; }
    const BoundaryField& operator[](int n) const { return values[n]; }

    void validate(const SpatialGrid& grid, const TimeGrid& tgrid) const;
};

BoundaryControl operator+(const BoundaryControl& a, const BoundaryControl& b);
BoundaryControl operator-(const BoundaryControl& a, const BoundaryControl& b);
BoundaryControl operator*(double s, const BoundaryControl& a);

/// L2(Sigma) inner product for step-constant boundary fields.
double control_inner(const SpatialGrid& grid, const TimeGrid& tgrid,
                     const BoundaryControl& a, const BoundaryControl& b);
double control_norm(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundaryControl& a);
double control_max_abs(const BoundaryControl& a);

struct InitialData {
    Field theta0;
    Field phi0;

    static InitialData zeros(const SpatialGrid& grid);
};

struct SolverOptions {
    int inner_sweeps = 2;           // staggered phi/theta coupling sweeps per step
    int newton_max_iterations = 50;
    double newton_tolerance = 1e-12;
    double guard_margin = 1e-9;     // singular potentials: clamp distance to the ends of D(beta)
    int retry_budget = 5;           // dt-halving retries after a rejected step

    void validate() const;
};

/// One staggered sweep: phi from the phi-substep, then theta from the theta-substep.
struct Sweep {
    Field phi;
    Field theta;
};

/// A single implicit Euler substep of length dt. A time step is one substep
/// unless the step had to be retried with a halved dt.
struct Substep {
    double dt = 0.0;
    Field theta_start;
    Field phi_start;
    std::vector<Sweep> sweeps;
};

struct StepDiagnostics {
    int substeps = 0;
    int newton_iterations = 0;
    double newton_residual = 0.0;
    int guard_rejections = 0;
    int retries = 0;
};

struct StateTrajectory {
    SpaceTimeField theta;
    SpaceTimeField phi;
    SpaceTimeField xi;
    BoundarySpaceTimeField theta_gamma;

    /// Per time step, the substeps with every sweep iterate; the exact
    /// linearization and its transpose replay these.
    std::vector<std::vector<Substep>> records;
    std::vector<StepDiagnostics> diagnostics;
    std::optional<Regularization> regularization;

    int steps() const { return static_cast<int>(theta.size()) - 1; }
    int guard_rejections() const;
};

/// Staggered implicit Euler solve of the phase-field system with the dynamic
/// boundary condition. Throws SolverError naming the failing step when the
/// retry budget is exhausted or a linear solve breaks down.
StateTrajectory solve_state(const SpatialGrid& grid, const TimeGrid& tgrid,
                            const PhysicalParams& params, const PotentialSpec& potential,
                            const std::optional<Regularization>& regularization,
                            const BoundaryControl& control, const InitialData& init,
                            const SolverOptions& options = {});

/// Max strong-form residual per step of the discrete equations the scheme solves,
/// evaluated on the trajectory's nodal fields.
std::vector<double> weak_form_residual(const StateTrajectory& traj, const SpatialGrid& grid,
                                       const TimeGrid& tgrid, const PhysicalParams& params,
                                       const PotentialSpec& potential,
                                       const BoundaryControl& control);

struct EnergyRecord {
    double time = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    /// Discrete leftover of the latent-heat cancellation, already part of rhs.
    double coupling_defect = 0.0;
};

/// Discrete first energy estimate at every time node:
///   lhs = 1/2|theta|^2 + int|grad theta|^2 + tau/2|theta_G|^2 + alpha int_S |theta_G|^2
///       + int|dt phi|^2 + sigma/2|grad phi|^2 + int beta_hat(phi)
///   rhs = initial terms + alpha int_S m u theta_G - int pi(phi) dt phi + coupling defect
std::vector<EnergyRecord> energy_diagnostic(const StateTrajectory& traj, const InitialData& init,
                                            const SpatialGrid& grid, const TimeGrid& tgrid,
                                            const PhysicalParams& params,
                                            const PotentialSpec& potential,
                                            const BoundaryControl& control);

struct BoundednessReport {
    double max_abs_theta = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    double max_abs_xi = 0.0;
    std::optional<bool> contained;  // set when a guard interval was supplied
};

BoundednessReport boundedness_check(const StateTrajectory& traj,
                                    std::optional<std::pair<double, double>> bounds = std::nullopt);

}  // namespace pfc
