#include "pfc/optimize.hpp"

#include "pfc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pfc {

ControlBounds ControlBounds::constant(const SpatialGrid& grid, const TimeGrid& tgrid, double lo, double hi) {
    return {BoundaryControl::constant(grid, tgrid, lo), BoundaryControl::constant(grid, tgrid, hi)};
}

void ControlBounds::validate(const SpatialGrid& grid, const TimeGrid& tgrid) const {
    u_min.validate(grid, tgrid);
    u_max.validate(grid, tgrid);
    for (int n = 0; n < u_min.steps(); ++n) {
        if ((u_min[n].array() > u_max[n].array()).any()) {
            throw InvalidArgument("bounds: u_min must not exceed u_max");
        }
    }
}

ControlProblem::ControlProblem(SpatialGrid grid, TimeGrid tgrid, PhysicalParams params,
                               PotentialSpec potential, std::optional<Regularization> regularization,
                               InitialData init, SolverOptions options)
    : grid_(std::move(grid)),
      tgrid_(tgrid),
      params_(std::move(params)),
      potential_(std::move(potential)),
      regularization_(regularization),
      init_(std::move(init)),
      options_(options) {
    params_.validate(grid_);
}

StateTrajectory ControlProblem::solve(const BoundaryControl& u) const {
    return solve_state(grid_, tgrid_, params_, potential_, regularization_, u, init_, options_);
}

ControlProblem::Evaluation ControlProblem::evaluate(const BoundaryControl& u, const CostSpec& cost) const {
    Evaluation e;
    e.state = solve(u);
    complete(e, cost);
    return e;
}

void ControlProblem::complete(Evaluation& e, const CostSpec& cost) const {
    e.cost = evaluate_cost(e.state, cost, grid_, tgrid_);
    e.adjoint = solve_adjoint(e.state, grid_, tgrid_, params_, potential_, cost);
    e.gradient = gradient(e.adjoint, params_);
}

double evaluate_cost(const StateTrajectory& state, const CostSpec& cost, const SpatialGrid& grid,
                     const TimeGrid& tgrid) {
    cost.validate(grid, tgrid);
    if (state.steps() != tgrid.steps()) throw InvalidArgument("evaluate_cost: state/time grid mismatch");
    const auto w = time_weights(tgrid);
    double j = 0.0;
    if (cost.kappa1 != 0.0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < state.theta.size(); ++k) {
            const Field e = state.theta[k] - cost.theta_Q[k];
            acc += w[k] * integrate_domain(grid, e.cwiseProduct(e));
        }
        j += 0.5 * cost.kappa1 * acc;
    }
    if (cost.kappa2 != 0.0) {
        const Field e = state.phi.back() - cost.phi_Omega;
        j += 0.5 * cost.kappa2 * integrate_domain(grid, e.cwiseProduct(e));
    }
    return j;
}

BoundaryControl project(const BoundaryControl& u, const ControlBounds& bounds) {
    if (u.steps() != bounds.u_min.steps() || u.steps() != bounds.u_max.steps()) {
        throw InvalidArgument("project: step count mismatch");
    }
    BoundaryControl out = u;
    for (int n = 0; n < u.steps(); ++n) {
        if (u[n].size() != bounds.u_min[n].size() || u[n].size() != bounds.u_max[n].size()) {
            throw InvalidArgument("project: boundary size mismatch");
        }
        for (Eigen::Index b = 0; b < u[n].size(); ++b) {
            if (bounds.u_min[n][b] > bounds.u_max[n][b]) throw InvalidArgument("project: u_min > u_max");
            out[n][b] = std::clamp(u[n][b], bounds.u_min[n][b], bounds.u_max[n][b]);
        }
    }
    return out;
}

double stationarity_residual(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundaryControl& u,
                             const BoundaryControl& g, const ControlBounds& bounds) {
    return control_norm(grid, tgrid, u - project(u - g, bounds));
}

namespace {

std::vector<std::vector<ActiveSet>> active_sets(const BoundaryControl& u, const ControlBounds& bounds) {
    std::vector<std::vector<ActiveSet>> out(u.steps());
    for (int n = 0; n < u.steps(); ++n) {
        out[n].resize(u[n].size(), ActiveSet::free);
        for (Eigen::Index b = 0; b < u[n].size(); ++b) {
            if (u[n][b] == bounds.u_min[n][b]) out[n][b] = ActiveSet::lower;
            else if (u[n][b] == bounds.u_max[n][b]) out[n][b] = ActiveSet::upper;
        }
    }
    return out;
}

}  // namespace

OptimizeReport projected_gradient(const BoundaryControl& u0, const ControlBounds& bounds,
                                  const ControlProblem& problem, const CostSpec& cost,
                                  const OptimizeOptions& opts) {
    const auto& grid = problem.grid();
    const auto& tgrid = problem.tgrid();
    bounds.validate(grid, tgrid);
    if (!(opts.s0 > 0.0) || !(opts.backtrack_ratio > 0.0 && opts.backtrack_ratio < 1.0)) {
        throw InvalidArgument("optimizer: need s0 > 0 and backtrack_ratio in (0,1)");
    }

    OptimizeReport rep;
    BoundaryControl u = project(u0, bounds);
    auto eval = problem.evaluate(u, cost);
    rep.evaluations = 1;
    double res = stationarity_residual(grid, tgrid, u, eval.gradient, bounds);
    rep.cost_history.push_back(eval.cost);
    rep.residual_history.push_back(res);

    while (true) {
        if (res <= opts.tol) {
            rep.converged = true;
            rep.termination = "stationary";
            break;
        }
        if (rep.iterations >= opts.max_iter) {
            rep.termination = "max_iter";
            break;
        }
        double s = opts.s0;
        bool accepted = false;
        ControlProblem::Evaluation trial_eval;
        BoundaryControl trial;
        for (int bt = 0; bt < opts.backtrack_budget; ++bt, s *= opts.backtrack_ratio) {
            trial = project(u - s * eval.gradient, bounds);
            const double d = control_norm(grid, tgrid, trial - u);
            try {
                trial_eval.state = problem.solve(trial);
            } catch (const SolverError&) {
                ++rep.evaluations;
                continue;
            }
            ++rep.evaluations;
            trial_eval.cost = evaluate_cost(trial_eval.state, cost, grid, tgrid);
            if (trial_eval.cost <= eval.cost - opts.armijo_c1 / s * d * d) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            rep.termination = "line search failed";
            break;
        }
        problem.complete(trial_eval, cost);
        u = std::move(trial);
        eval = std::move(trial_eval);
        res = stationarity_residual(grid, tgrid, u, eval.gradient, bounds);
        ++rep.iterations;
        rep.cost_history.push_back(eval.cost);
        rep.residual_history.push_back(res);
        rep.step_history.push_back(s);
    }

    rep.active = active_sets(u, bounds);
    rep.certification = check_optimality(u, eval.adjoint, problem.params(), bounds, grid, tgrid);
    rep.control = std::move(u);
    return rep;
}

CertificationReport check_optimality(const BoundaryControl& u, const AdjointTrajectory& adjoint,
                                     const PhysicalParams& params, const ControlBounds& bounds,
                                     const SpatialGrid& grid, const TimeGrid& tgrid,
                                     std::optional<double> tol_sign) {
    u.validate(grid, tgrid);
    bounds.validate(grid, tgrid);
    if (adjoint.p_gamma.size() != static_cast<std::size_t>(tgrid.steps() + 1)) {
        throw InvalidArgument("check_optimality: adjoint/time grid mismatch");
    }
    double smax = 0.0;
    for (int n = 0; n < u.steps(); ++n) {
        smax = std::max(smax, params.m.cwiseProduct(adjoint.p_gamma[n]).cwiseAbs().maxCoeff());
    }
    CertificationReport rep;
    rep.tol_sign = tol_sign.value_or(1e-8 * (1.0 + smax));
    const double tol = rep.tol_sign;
    const auto bw = grid.boundary_weights();

    for (int n = 0; n < u.steps(); ++n) {
        for (Eigen::Index b = 0; b < u[n].size(); ++b) {
            const double s = params.m[b] * adjoint.p_gamma[n][b];
            const double lo = bounds.u_min[n][b];
            const double hi = bounds.u_max[n][b];
            bool ok = true;
            if (s < -tol) ok = std::abs(u[n][b] - hi) <= tol;
            else if (s > tol) ok = std::abs(u[n][b] - lo) <= tol;
            ++rep.pairs;
            if (ok) ++rep.satisfied;
            else rep.violations.emplace_back(n, static_cast<int>(b));
            // max over y in [lo, hi] of -s (y - u) is attained at an endpoint
            const double worst = std::max(-s * (lo - u[n][b]), -s * (hi - u[n][b]));
            rep.normal_cone_residual += tgrid.dt() * bw[b] * std::max(0.0, worst);
        }
    }
    rep.satisfied_fraction = rep.pairs > 0 ? static_cast<double>(rep.satisfied) / rep.pairs : 1.0;
    return rep;
}

}  // namespace pfc
