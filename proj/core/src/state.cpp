#include "pfc/state.hpp"

#include "pfc/errors.hpp"
#include "scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pfc {

using detail::Scheme;

void PhysicalParams::validate(const SpatialGrid& grid) const {
    if (!(sigma > 0.0)) throw InvalidArgument("params: sigma must be positive");
    if (!(tau > 0.0)) throw InvalidArgument("params: tau must be positive");
    if (!(alpha > 0.0)) throw InvalidArgument("params: alpha must be positive");
    if (static_cast<std::size_t>(m.size()) != grid.boundary_size()) {
        throw InvalidArgument("params: m must have one value per boundary node");
    }
    for (Eigen::Index b = 0; b < m.size(); ++b) {
        if (!(m[b] >= 0.0) || !std::isfinite(m[b])) {
            throw InvalidArgument("params: m must be finite and nonnegative");
        }
    }
}

BoundaryControl BoundaryControl::constant(const SpatialGrid& grid, const TimeGrid& tgrid, double c) {
    BoundaryControl u;
    u.values.assign(tgrid.steps(), BoundaryField::Constant(grid.boundary_size(), c));
    return u;
}

void BoundaryControl::validate(const SpatialGrid& grid, const TimeGrid& tgrid) const {
    if (steps() != tgrid.steps()) {
        throw InvalidArgument("control: expected " + std::to_string(tgrid.steps()) +
                              " steps, got " + std::to_string(steps()));
    }
    for (const auto& v : values) {
        if (static_cast<std::size_t>(v.size()) != grid.boundary_size()) {
            throw InvalidArgument("control: boundary field size mismatch");
        }
        if (!v.allFinite()) throw InvalidArgument("control: values must be finite");
    }
}

BoundaryControl operator+(const BoundaryControl& a, const BoundaryControl& b) {
    BoundaryControl out = a;
    for (int n = 0; n < out.steps(); ++n) out[n] += b[n];
    return out;
}

BoundaryControl operator-(const BoundaryControl& a, const BoundaryControl& b) {
    BoundaryControl out = a;
    for (int n = 0; n < out.steps(); ++n) out[n] -= b[n];
    return out;
}

BoundaryControl operator*(double s, const BoundaryControl& a) {
    BoundaryControl out = a;
    for (auto& v : out.values) v *= s;
    return out;
}

double control_inner(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundaryControl& a,
                     const BoundaryControl& b) {
    if (a.steps() != b.steps()) throw InvalidArgument("control_inner: step count mismatch");
    double s = 0.0;
    for (int n = 0; n < a.steps(); ++n) {
        s += integrate_boundary(grid, a[n].cwiseProduct(b[n]));
    }
    return tgrid.dt() * s;
}

double control_norm(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundaryControl& a) {
    return std::sqrt(std::max(0.0, control_inner(grid, tgrid, a, a)));
}

double control_max_abs(const BoundaryControl& a) {
    double m = 0.0;
    for (const auto& v : a.values) {
        if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
    }
    return m;
}

InitialData InitialData::zeros(const SpatialGrid& grid) {
    return {Field::Zero(grid.size()), Field::Zero(grid.size())};
}

void SolverOptions::validate() const {
    if (inner_sweeps < 1) throw InvalidArgument("solver: inner_sweeps must be >= 1");
    if (newton_max_iterations < 1) throw InvalidArgument("solver: newton_max_iterations must be >= 1");
    if (!(newton_tolerance > 0.0)) throw InvalidArgument("solver: newton_tolerance must be positive");
    if (!(guard_margin > 0.0)) throw InvalidArgument("solver: guard_margin must be positive");
    if (retry_budget < 0) throw InvalidArgument("solver: retry_budget must be >= 0");
}

int StateTrajectory::guard_rejections() const {
    int total = 0;
    for (const auto& d : diagnostics) total += d.guard_rejections;
    return total;
}

namespace {

enum class Failure { none, newton, guard, domain };

struct PhiResult {
    Field phi;
    int iterations = 0;
    double residual = 0.0;
    Failure failure = Failure::none;
};

using Guard = std::optional<std::pair<double, double>>;

// Damped Newton for the phi-substep. Residual in strong (mass-divided) form.
PhiResult phi_substep(Scheme& s, const Field& phi_start, const Field& theta_lag, double dt,
                      const SolverOptions& opts, const Guard& guard) {
    const auto& nl = s.nonlin();
    const Field& M = s.mass();
    const double sigma = s.params().sigma;
    const Eigen::Index n = phi_start.size();

    Field source(n);
    Field scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        source[i] = phi_start[i] / dt - nl.pi(phi_start[i]) + theta_lag[i] * nl.lambda(phi_start[i]);
        scale[i] = 1.0 / dt + sigma * s.stiffness().coeff(i, i) / M[i];
    }

    auto residual = [&](const Field& phi) {
        Field r = sigma * s.stiff(phi);
        for (Eigen::Index i = 0; i < n; ++i) {
            r[i] = phi[i] / dt + r[i] / M[i] + nl.beta(phi[i]) - source[i];
        }
        return r;
    };
    auto weighted_norm = [&](const Field& r) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += M[i] * r[i] * r[i];
        return std::isfinite(acc) ? std::sqrt(acc) : std::numeric_limits<double>::infinity();
    };
    auto clamp = [&](Field& phi) {
        if (!guard) return;
        for (Eigen::Index i = 0; i < n; ++i) phi[i] = std::clamp(phi[i], guard->first, guard->second);
    };

    PhiResult out;
    out.phi = phi_start;
    clamp(out.phi);
    Field r = residual(out.phi);
    double rnorm = weighted_norm(r);
    for (int it = 0;; ++it) {
        const double scaled = r.allFinite() ? (r.cwiseAbs().cwiseQuotient(scale)).maxCoeff()
                                            : std::numeric_limits<double>::infinity();
        out.residual = scaled;
        const double phimax = std::max(1.0, out.phi.cwiseAbs().maxCoeff());
        if (scaled <= opts.newton_tolerance * phimax) break;
        if (it >= opts.newton_max_iterations) {
            out.failure = Failure::newton;
            return out;
        }
        out.iterations = it + 1;

        const auto J = s.phi_jacobian(dt, out.phi);
        const Field rhs = -M.cwiseProduct(r);
        const Field delta = detail::factor_solve(s.phi_solver(), J, rhs, s.phi_pattern_ready);

        double step = 1.0;
        Field trial;
        Field rtrial;
        double tnorm = std::numeric_limits<double>::infinity();
        for (int ls = 0; ls < 30; ++ls) {
            trial = out.phi + step * delta;
            clamp(trial);
            rtrial = residual(trial);
            tnorm = weighted_norm(rtrial);
            if (tnorm < rnorm) break;
            step *= 0.5;
        }
        if (!std::isfinite(tnorm)) {
            out.failure = guard ? Failure::newton : Failure::domain;
            return out;
        }
        out.phi = std::move(trial);
        r = std::move(rtrial);
        rnorm = tnorm;
    }

    if (guard) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (out.phi[i] <= guard->first || out.phi[i] >= guard->second) {
                out.failure = Failure::guard;
                return out;
            }
        }
    }
    return out;
}

Field theta_substep(Scheme& s, const Field& theta_start, const Field& phi_start, const Field& phi,
                    const BoundaryField& u, double dt) {
    const auto& nl = s.nonlin();
    const Field& M = s.mass();
    const double tau = s.params().tau;
    const double alpha = s.params().alpha;
    const Field ue = embed(s.grid(), u);
    Field rhs(theta_start.size());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) {
        rhs[i] = (M[i] / dt + tau / dt * s.bmass()[i]) * theta_start[i] -
                 M[i] / dt * nl.lambda(phi[i]) * (phi[i] - phi_start[i]) +
                 alpha * s.control_weight()[i] * ue[i];
    }
    const auto& solver = s.theta_solver(dt);
    Field theta = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !theta.allFinite()) {
        throw SolverError("theta-substep linear solve failed");
    }
    return theta;
}

struct StepAttempt {
    std::vector<Substep> substeps;
    Failure failure = Failure::none;
    int newton_iterations = 0;
    double newton_residual = 0.0;
};

StepAttempt attempt_step(Scheme& s, const Field& theta0, const Field& phi0, const BoundaryField& u,
                         double dt, int pieces, const SolverOptions& opts, const Guard& guard) {
    StepAttempt att;
    const double h = dt / pieces;
    Field theta = theta0;
    Field phi = phi0;
    for (int p = 0; p < pieces; ++p) {
        Substep sub;
        sub.dt = h;
        sub.theta_start = theta;
        sub.phi_start = phi;
        Field lag = theta;
        for (int k = 0; k < opts.inner_sweeps; ++k) {
            auto res = phi_substep(s, sub.phi_start, lag, h, opts, guard);
            att.newton_iterations += res.iterations;
            att.newton_residual = std::max(att.newton_residual, res.residual);
            if (res.failure != Failure::none) {
                att.failure = res.failure;
                return att;
            }
            Field th = theta_substep(s, sub.theta_start, sub.phi_start, res.phi, u, h);
            lag = th;
            sub.sweeps.push_back({std::move(res.phi), std::move(th)});
        }
        theta = sub.sweeps.back().theta;
        phi = sub.sweeps.back().phi;
        att.substeps.push_back(std::move(sub));
    }
    return att;
}

const char* failure_name(Failure f) {
    switch (f) {
        case Failure::newton: return "Newton did not converge";
        case Failure::guard: return "phi reached the invariant-region guard";
        case Failure::domain: return "phi left D(beta)";
        default: return "ok";
    }
}

void validate_inputs(const SpatialGrid& grid, const TimeGrid& tgrid, const PhysicalParams& params,
                     const BoundaryControl& control, const InitialData& init,
                     const Nonlinearity& nl, const SolverOptions& opts) {
    params.validate(grid);
    control.validate(grid, tgrid);
    opts.validate();
    if (static_cast<std::size_t>(init.theta0.size()) != grid.size() ||
        static_cast<std::size_t>(init.phi0.size()) != grid.size()) {
        throw InvalidArgument("initial data: size mismatch with grid");
    }
    if (!init.theta0.allFinite() || !init.phi0.allFinite()) {
        throw InvalidArgument("initial data: values must be finite");
    }
    if (auto g = nl.guard(opts.guard_margin)) {
        for (Eigen::Index i = 0; i < init.phi0.size(); ++i) {
            if (!(init.phi0[i] > g->first && init.phi0[i] < g->second)) {
                throw InvalidArgument("initial data: phi0 must lie strictly inside D(beta)");
            }
        }
    }
}

}  // namespace

StateTrajectory solve_state(const SpatialGrid& grid, const TimeGrid& tgrid,
                            const PhysicalParams& params, const PotentialSpec& potential,
                            const std::optional<Regularization>& regularization,
                            const BoundaryControl& control, const InitialData& init,
                            const SolverOptions& options) {
    Nonlinearity nl(potential, regularization);
    validate_inputs(grid, tgrid, params, control, init, nl, options);
    Scheme scheme(grid, params, nl);
    const Guard guard = nl.guard(options.guard_margin);

    const int N = tgrid.steps();
    StateTrajectory traj;
    traj.regularization = regularization;
    traj.theta.reserve(N + 1);
    traj.phi.reserve(N + 1);
    traj.theta.push_back(init.theta0);
    traj.phi.push_back(init.phi0);
    traj.records.resize(N);
    traj.diagnostics.resize(N);

    for (int n = 0; n < N; ++n) {
        auto& diag = traj.diagnostics[n];
        StepAttempt att;
        for (int retry = 0; retry <= options.retry_budget; ++retry) {
            att = attempt_step(scheme, traj.theta[n], traj.phi[n], control[n], tgrid.dt(),
                               1 << retry, options, guard);
            diag.newton_iterations += att.newton_iterations;
            diag.newton_residual = std::max(diag.newton_residual, att.newton_residual);
            if (att.failure == Failure::none) break;
            if (att.failure == Failure::guard) ++diag.guard_rejections;
            ++diag.retries;
        }
        if (att.failure != Failure::none) {
            throw SolverError("step " + std::to_string(n) + ": " + failure_name(att.failure) +
                                  " after " + std::to_string(options.retry_budget) + " dt-halving retries",
                              n);
        }
        diag.substeps = static_cast<int>(att.substeps.size());
        traj.theta.push_back(att.substeps.back().sweeps.back().theta);
        traj.phi.push_back(att.substeps.back().sweeps.back().phi);
        traj.records[n] = std::move(att.substeps);
    }

    traj.xi.reserve(N + 1);
    traj.theta_gamma.reserve(N + 1);
    for (int k = 0; k <= N; ++k) {
        traj.xi.push_back(traj.phi[k].unaryExpr([&](double r) { return nl.beta(r); }));
        traj.theta_gamma.push_back(trace(grid, traj.theta[k]));
    }
    return traj;
}

namespace {

struct SubstepView {
    double dt;
    const Field* theta_s;
    const Field* phi_s;
    const Field* theta_e;
    const Field* phi_e;
    const Field* theta_lag;
};

// Substeps of step n, with the step's end points taken from the nodal fields.
std::vector<SubstepView> substeps_of(const StateTrajectory& traj, int n) {
    const auto& recs = traj.records.at(n);
    std::vector<SubstepView> views;
    for (std::size_t j = 0; j < recs.size(); ++j) {
        const auto& sub = recs[j];
        SubstepView v{};
        v.dt = sub.dt;
        v.theta_s = j == 0 ? &traj.theta[n] : &sub.theta_start;
        v.phi_s = j == 0 ? &traj.phi[n] : &sub.phi_start;
        v.theta_e = j + 1 == recs.size() ? &traj.theta[n + 1] : &recs[j + 1].theta_start;
        v.phi_e = j + 1 == recs.size() ? &traj.phi[n + 1] : &recs[j + 1].phi_start;
        const auto K = sub.sweeps.size();
        v.theta_lag = K >= 2 ? &sub.sweeps[K - 2].theta : v.theta_s;
        views.push_back(v);
    }
    return views;
}

void require_trajectory(const StateTrajectory& traj, const TimeGrid& tgrid) {
    if (traj.steps() != tgrid.steps() || static_cast<int>(traj.records.size()) != tgrid.steps()) {
        throw InvalidArgument("trajectory does not match the time grid");
    }
}

}  // namespace

std::vector<double> weak_form_residual(const StateTrajectory& traj, const SpatialGrid& grid,
                                       const TimeGrid& tgrid, const PhysicalParams& params,
                                       const PotentialSpec& potential,
                                       const BoundaryControl& control) {
    require_trajectory(traj, tgrid);
    Nonlinearity nl(potential, traj.regularization);
    Scheme s(grid, params, nl);
    const Field& M = s.mass();
    const Field& B = s.bmass();
    std::vector<double> out(tgrid.steps(), 0.0);

    for (int n = 0; n < tgrid.steps(); ++n) {
        const Field ue = embed(grid, control[n]);
        double worst = 0.0;
        for (const auto& v : substeps_of(traj, n)) {
            const Field& ts = *v.theta_s;
            const Field& ps = *v.phi_s;
            const Field& te = *v.theta_e;
            const Field& pe = *v.phi_e;
            const Field At = s.stiff(te);
            const Field Ap = s.stiff(pe);
            for (Eigen::Index i = 0; i < te.size(); ++i) {
                const double rt = (M[i] * (te[i] - ts[i]) / v.dt + At[i] +
                                   M[i] * nl.lambda(pe[i]) * (pe[i] - ps[i]) / v.dt +
                                   params.tau * B[i] * (te[i] - ts[i]) / v.dt +
                                   params.alpha * B[i] * te[i] -
                                   params.alpha * s.control_weight()[i] * ue[i]) /
                                  M[i];
                const double rp = (pe[i] - ps[i]) / v.dt + params.sigma * Ap[i] / M[i] +
                                  nl.beta(pe[i]) + nl.pi(ps[i]) -
                                  (*v.theta_lag)[i] * nl.lambda(ps[i]);
                worst = std::max({worst, std::abs(rt), std::abs(rp)});
            }
        }
        // xi and the boundary trace are part of the stored solution too
        for (int k : {n, n + 1}) {
            for (Eigen::Index i = 0; i < traj.phi[k].size(); ++i) {
                worst = std::max(worst, std::abs(traj.xi[k][i] - nl.beta(traj.phi[k][i])));
            }
            worst = std::max(worst, (traj.theta_gamma[k] - trace(grid, traj.theta[k])).cwiseAbs().maxCoeff());
        }
        out[n] = std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
    }
    return out;
}

std::vector<EnergyRecord> energy_diagnostic(const StateTrajectory& traj, const InitialData& init,
                                            const SpatialGrid& grid, const TimeGrid& tgrid,
                                            const PhysicalParams& params,
                                            const PotentialSpec& potential,
                                            const BoundaryControl& control) {
    require_trajectory(traj, tgrid);
    Nonlinearity nl(potential, traj.regularization);
    Scheme s(grid, params, nl);
    const Field& M = s.mass();

    auto boundary_sq = [&](const Field& f) {
        const BoundaryField g = trace(grid, f);
        return integrate_boundary(grid, g.cwiseProduct(g));
    };
    auto instantaneous = [&](const Field& theta, const Field& phi) {
        double e = 0.5 * theta.dot(M.cwiseProduct(theta)) + 0.5 * params.tau * boundary_sq(theta) +
                   0.5 * params.sigma * dirichlet_energy(grid, phi);
        for (Eigen::Index i = 0; i < phi.size(); ++i) e += M[i] * nl.beta_hat(phi[i]);
        return e;
    };

    const double initial = instantaneous(init.theta0, init.phi0);
    std::vector<EnergyRecord> out(tgrid.steps() + 1);
    out[0] = {0.0, initial, initial, 0.0, 0.0};

    double dissipation = 0.0;  // time-integrated lhs terms
    double supplied = 0.0;     // time-integrated rhs terms
    double defect = 0.0;
    for (int n = 0; n < tgrid.steps(); ++n) {
        const BoundaryField mu = params.m.cwiseProduct(control[n]);
        for (const auto& v : substeps_of(traj, n)) {
            const Field& ps = *v.phi_s;
            const Field& te = *v.theta_e;
            const Field& pe = *v.phi_e;
            const Field dphi = pe - ps;
            const BoundaryField tg = trace(grid, te);
            dissipation += v.dt * dirichlet_energy(grid, te) +
                           v.dt * params.alpha * integrate_boundary(grid, tg.cwiseProduct(tg)) +
                           dphi.dot(M.cwiseProduct(dphi)) / v.dt;
            supplied += v.dt * params.alpha * integrate_boundary(grid, mu.cwiseProduct(tg));
            for (Eigen::Index i = 0; i < pe.size(); ++i) {
                supplied -= M[i] * nl.pi(ps[i]) * dphi[i];
                const double d =
                    M[i] * ((*v.theta_lag)[i] * nl.lambda(ps[i]) - te[i] * nl.lambda(pe[i])) * dphi[i];
                supplied += d;
                defect += d;
            }
        }
        EnergyRecord& rec = out[n + 1];
        rec.time = tgrid.time(n + 1);
        rec.lhs = instantaneous(traj.theta[n + 1], traj.phi[n + 1]) + dissipation;
        rec.rhs = initial + supplied;
        rec.slack = rec.rhs - rec.lhs;
        rec.coupling_defect = defect;
    }
    return out;
}

BoundednessReport boundedness_check(const StateTrajectory& traj,
                                    std::optional<std::pair<double, double>> bounds) {
    BoundednessReport rep;
    if (traj.theta.empty()) return rep;
    rep.min_phi = std::numeric_limits<double>::infinity();
    rep.max_phi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.theta.size(); ++k) {
        rep.max_abs_theta = std::max(rep.max_abs_theta, traj.theta[k].cwiseAbs().maxCoeff());
        rep.min_phi = std::min(rep.min_phi, traj.phi[k].minCoeff());
        rep.max_phi = std::max(rep.max_phi, traj.phi[k].maxCoeff());
        if (k < traj.xi.size()) rep.max_abs_xi = std::max(rep.max_abs_xi, traj.xi[k].cwiseAbs().maxCoeff());
    }
    if (bounds) rep.contained = rep.min_phi >= bounds->first && rep.max_phi <= bounds->second;
    return rep;
}

}  // namespace pfc
