#pragma once

#include "pfc/optimize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pfc {

/// A complete problem: discretization, model data, a control, the cost and the box.
struct Instance {
    SpatialGrid grid;
    TimeGrid tgrid;
    PhysicalParams params;
    PotentialSpec potential;
    std::optional<Regularization> regularization;
    InitialData init;
    BoundaryControl control;
    CostSpec cost;
    ControlBounds bounds;
    SolverOptions options;
    std::uint64_t seed = 0;

    ControlProblem problem() const;
};

struct InstanceRecipe {
    Dimension dimension = Dimension::interval;
    std::vector<double> lengths{1.0};
    std::vector<int> node_counts{9};
    double horizon = 1.0;
    int steps = 8;
    PotentialVariant variant = PotentialVariant::logarithmic;
    double a = 2.0;
    bool tanh_latent = false;
    double ell = 1.0;
    double phi_amplitude = 0.5;
    double theta_amplitude = 0.5;
    double u_min = -1.0;
    double u_max = 1.0;
    double kappa1 = 1.0;
    double kappa2 = 0.5;
    bool zero_data = false;
};

/// Seeded random instance: smooth initial data and targets, control uniform in the box.
Instance make_instance(const InstanceRecipe& recipe, std::uint64_t seed);

/// theta_Q is the state of a random control strictly inside the box, kappa2 = 0,
/// and the instance control is the box midpoint.
Instance make_self_tracking(const InstanceRecipe& recipe, std::uint64_t seed);

/// Uniform entries in [-1, 1].
BoundaryControl random_direction(const SpatialGrid& grid, const TimeGrid& tgrid, std::uint64_t seed);

enum class Fault { none, negate_gradient, perturb_trajectory };

Fault parse_fault(const std::string& name);
std::string to_string(Fault fault);

struct GradCheckOptions {
    int directions = 5;
    std::vector<double> deltas{1e-1, 1e-2, 1e-3};
    double central_delta = 1e-4;
    double rel_tol = 1e-3;
    double slope_min = 1.7;
    double slope_max = 2.3;
    double gap_tol = 1e-10;
    Fault fault = Fault::none;
};

struct DirectionProbe {
    double adjoint_derivative = 0.0;  // <g, h>
    double central_difference = 0.0;
    double rel_error = 0.0;
    std::vector<double> cost_remainders;
    std::vector<double> state_remainders;
    std::optional<double> cost_slope;   // unset when every remainder is at round-off
    std::optional<double> state_slope;
    double duality_gap = 0.0;
    bool rel_ok = false;
    bool slope_ok = false;
    bool gap_ok = false;
    std::string error;
};

struct GradCheckReport {
    std::uint64_t seed = 0;
    GradCheckOptions options;
    std::vector<DirectionProbe> probes;
    double worst_rel_error = 0.0;
    double worst_gap = 0.0;
    bool rel_ok = true;
    bool slope_ok = true;
    bool gap_ok = true;
    bool passed = true;
};

GradCheckReport grad_check(const Instance& instance, const GradCheckOptions& options = {});

/// Least-squares slope of log(remainder) against log(delta), ignoring entries at
/// or below `floor`. Empty when fewer than two entries remain.
std::optional<double> loglog_slope(const std::vector<double>& deltas, const std::vector<double>& remainders,
                                   double floor);

struct EpsilonSweepReport {
    std::uint64_t seed = 0;
    std::vector<double> epsilons;
    std::vector<double> phi_successive;    // ||phi_eps_i - phi_eps_{i+1}||_{L2(Q)}
    std::vector<double> theta_successive;
    std::vector<double> phi_to_direct;     // ||phi_eps_i - phi_direct||_{L2(Q)}
    std::vector<double> theta_to_direct;
    bool successive_decreasing = true;
    bool direct_decreasing = true;
    bool passed = true;
};

EpsilonSweepReport epsilon_sweep(const Instance& instance, const std::vector<double>& epsilons);

/// Strictly decreasing, except that a run of exact zeros counts as decreasing.
bool strictly_decreasing(const std::vector<double>& values);

struct ContdepPair {
    std::vector<double> separations;
    std::vector<double> ratios;
    double band = 1.0;
};

struct ContdepReport {
    std::uint64_t seed = 0;
    double band_limit = 100.0;
    std::vector<ContdepPair> pairs;
    double worst_band = 1.0;
    bool passed = true;
};

/// Ratio of the continuous-dependence norm of the state difference to
/// ||u1 - u2||_{L2(Sigma)} for pairs u2 = u1 + s d, ||d|| = 1.
ContdepReport contdep_probe(const Instance& instance, int n_pairs,
                            const std::vector<double>& separations = {1.0, 1e-2, 1e-4, 1e-6},
                            double band_limit = 100.0);

struct AuditEntry {
    std::string label;
    BoundednessReport report;
    double data_norm = 0.0;
};

struct BoundedAuditReport {
    std::uint64_t seed = 0;
    std::vector<AuditEntry> entries;
    double max_abs_theta = 0.0;
    double data_norm = 0.0;
    double envelope = 10.0;
    bool theta_bounded = true;
    std::optional<bool> phi_interior;  // singular potentials only
    int guard_rejections = 0;
    bool passed = true;
};

/// Box corners plus `n_random` controls drawn uniformly from the box.
BoundedAuditReport bounded_audit(const Instance& instance, int n_random = 10, double envelope = 10.0,
                                 double interior_margin = 1e-6);

}  // namespace pfc
