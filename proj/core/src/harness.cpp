#include "pfc/harness.hpp"

#include "pfc/errors.hpp"
#include "pfc/norms.hpp"
#include "pfc/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pfc {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Low cosine modes with random coefficients, scaled so that max |f| <= amplitude.
Field smooth_field(const SpatialGrid& grid, Rng& rng, double amplitude) {
    constexpr int modes = 3;
    const int ly = grid.axes() == 2 ? modes : 1;
    std::vector<double> c(modes * ly);
    double total = 0.0;
    for (double& v : c) {
        v = uniform(rng, -1.0, 1.0);
        total += std::abs(v);
    }
    Field f = Field::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t node = 0; node < grid.size(); ++node) {
        const double x = grid.coordinate(node, 0) / grid.length(0);
        const double y = grid.axes() == 2 ? grid.coordinate(node, 1) / grid.length(1) : 0.0;
        double v = 0.0;
        for (int k = 0; k < modes; ++k) {
            for (int l = 0; l < ly; ++l) {
                v += c[k * ly + l] * std::cos(k * std::numbers::pi * x) * std::cos(l * std::numbers::pi * y);
            }
        }
        f[static_cast<Eigen::Index>(node)] = total > 0.0 ? amplitude * v / total : 0.0;
    }
    return f;
}

BoundaryControl random_control(const SpatialGrid& grid, const TimeGrid& tgrid, Rng& rng, double lo,
                               double hi) {
    BoundaryControl u = BoundaryControl::zeros(grid, tgrid);
    for (auto& v : u.values) {
        for (Eigen::Index b = 0; b < v.size(); ++b) v[b] = uniform(rng, lo, hi);
    }
    return u;
}

PotentialSpec make_potential(const InstanceRecipe& r) {
    LatentHeat latent = r.tanh_latent ? LatentHeat::log_cosh() : LatentHeat::linear(r.ell);
    switch (r.variant) {
        case PotentialVariant::regular: return PotentialSpec::regular(latent);
        case PotentialVariant::logarithmic: return PotentialSpec::logarithmic(r.a, latent);
        case PotentialVariant::custom_smooth: break;
    }
    throw InvalidArgument("instance recipe: custom potentials need an explicit Instance");
}

SpaceTimeField diff(const SpaceTimeField& a, const SpaceTimeField& b) { return difference(a, b); }

double state_distance(const SpatialGrid& grid, const TimeGrid& tgrid, const StateTrajectory& a,
                      const StateTrajectory& b, const SensitivityTrajectory* lin, double delta) {
    SpaceTimeField th = diff(a.theta, b.theta);
    BoundarySpaceTimeField tg = diff(a.theta_gamma, b.theta_gamma);
    SpaceTimeField ph = diff(a.phi, b.phi);
    if (lin) {
        for (std::size_t k = 0; k < th.size(); ++k) {
            th[k] -= delta * lin->Theta[k];
            tg[k] -= delta * lin->Theta_gamma[k];
            ph[k] -= delta * lin->Phi[k];
        }
    }
    return norm_y(grid, tgrid, th, tg, ph);
}

}  // namespace

ControlProblem Instance::problem() const {
    return ControlProblem(grid, tgrid, params, potential, regularization, init, options);
}

Instance make_instance(const InstanceRecipe& r, std::uint64_t seed) {
    Rng rng(seed);
    SpatialGrid grid = build_grid(r.dimension, r.lengths, r.node_counts);
    TimeGrid tgrid(r.horizon, r.steps);
    PhysicalParams params;
    params.m = BoundaryField::Ones(static_cast<Eigen::Index>(grid.boundary_size()));

    InitialData init = InitialData::zeros(grid);
    BoundaryControl control = BoundaryControl::zeros(grid, tgrid);
    CostSpec cost = CostSpec::zeros(grid, tgrid, r.kappa1, r.kappa2);
    if (!r.zero_data) {
        init.theta0 = smooth_field(grid, rng, r.theta_amplitude);
        init.phi0 = smooth_field(grid, rng, r.phi_amplitude);
        control = random_control(grid, tgrid, rng, r.u_min, r.u_max);
        for (auto& q : cost.theta_Q) q = smooth_field(grid, rng, r.theta_amplitude);
        cost.phi_Omega = smooth_field(grid, rng, r.phi_amplitude);
    }
    ControlBounds bounds = ControlBounds::constant(grid, tgrid, r.u_min, r.u_max);
    bounds.validate(grid, tgrid);
    return Instance{std::move(grid), tgrid, std::move(params), make_potential(r), std::nullopt,
                    std::move(init), std::move(control), std::move(cost), std::move(bounds),
                    SolverOptions{}, seed};
}

Instance make_self_tracking(const InstanceRecipe& r, std::uint64_t seed) {
    Instance inst = make_instance(r, seed);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const double w = r.u_max - r.u_min;
    const BoundaryControl dagger =
        random_control(inst.grid, inst.tgrid, rng, r.u_min + 0.25 * w, r.u_max - 0.25 * w);
    const StateTrajectory target = inst.problem().solve(dagger);
    inst.cost.theta_Q = target.theta;
    inst.cost.kappa2 = 0.0;
    inst.control = BoundaryControl::constant(inst.grid, inst.tgrid, r.u_min + 0.5 * w);
    return inst;
}

BoundaryControl random_direction(const SpatialGrid& grid, const TimeGrid& tgrid, std::uint64_t seed) {
    Rng rng(seed);
    return random_control(grid, tgrid, rng, -1.0, 1.0);
}

Fault parse_fault(const std::string& name) {
    if (name.empty() || name == "none") return Fault::none;
    if (name == "negate-gradient") return Fault::negate_gradient;
    if (name == "perturb-trajectory") return Fault::perturb_trajectory;
    throw InvalidArgument("unknown fault '" + name + "' (expected negate-gradient or perturb-trajectory)");
}

std::string to_string(Fault fault) {
    switch (fault) {
        case Fault::none: return "none";
        case Fault::negate_gradient: return "negate-gradient";
        case Fault::perturb_trajectory: return "perturb-trajectory";
    }
    return "none";
}

std::optional<double> loglog_slope(const std::vector<double>& deltas, const std::vector<double>& remainders,
                                   double floor) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < deltas.size() && i < remainders.size(); ++i) {
        if (remainders[i] > floor && deltas[i] > 0.0) {
            xs.push_back(std::log(deltas[i]));
            ys.push_back(std::log(remainders[i]));
        }
    }
    if (xs.size() < 2) return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

GradCheckReport grad_check(const Instance& inst, const GradCheckOptions& opt) {
    if (opt.directions < 1 || opt.deltas.empty()) {
        throw InvalidArgument("grad_check: need at least one direction and one delta");
    }
    const ControlProblem problem = inst.problem();
    const auto& grid = inst.grid;
    const auto& tgrid = inst.tgrid;

    GradCheckReport rep;
    rep.seed = inst.seed;
    rep.options = opt;

    const StateTrajectory base = problem.solve(inst.control);
    const double j0 = evaluate_cost(base, inst.cost, grid, tgrid);

    StateTrajectory adj_state = base;
    if (opt.fault == Fault::perturb_trajectory) {
        for (auto& th : adj_state.theta) th.array() += 1.0;
    }
    const AdjointTrajectory adj = solve_adjoint(adj_state, grid, tgrid, inst.params, inst.potential, inst.cost);
    BoundaryControl g = gradient(adj, inst.params);
    if (opt.fault == Fault::negate_gradient) g = -1.0 * g;

    const double s0_norm = norm_y(grid, tgrid, base.theta, base.theta_gamma, base.phi);
    const double j_floor = 1e-14 * (1.0 + std::abs(j0));
    const double s_floor = 1e-12 * (1.0 + s0_norm);

    auto cost_at = [&](const BoundaryControl& u) {
        return evaluate_cost(problem.solve(u), inst.cost, grid, tgrid);
    };

    for (int d = 0; d < opt.directions; ++d) {
        DirectionProbe pr;
        try {
            const BoundaryControl h = random_direction(grid, tgrid, inst.seed * 1000003ULL + d + 1);
            pr.adjoint_derivative = control_inner(grid, tgrid, g, h);

            const double dl = opt.central_delta;
            pr.central_difference = (cost_at(inst.control + dl * h) - cost_at(inst.control - dl * h)) / (2.0 * dl);
            const double scale = std::max(std::abs(pr.central_difference), std::abs(pr.adjoint_derivative));
            pr.rel_error = scale > j_floor / dl ? std::abs(pr.central_difference - pr.adjoint_derivative) / scale : 0.0;

            const SensitivityTrajectory lin =
                solve_linearized(base, grid, tgrid, inst.params, inst.potential, h);
            for (double delta : opt.deltas) {
                const StateTrajectory moved = problem.solve(inst.control + delta * h);
                const double jm = evaluate_cost(moved, inst.cost, grid, tgrid);
                pr.cost_remainders.push_back(std::abs(jm - j0 - delta * pr.adjoint_derivative));
                pr.state_remainders.push_back(state_distance(grid, tgrid, moved, base, &lin, delta));
            }
            pr.cost_slope = loglog_slope(opt.deltas, pr.cost_remainders, j_floor);
            pr.state_slope = loglog_slope(opt.deltas, pr.state_remainders, s_floor);

            // against the gradient actually in use, so injected faults show up here too
            const SensitivityTrajectory lin_adj =
                solve_linearized(adj_state, grid, tgrid, inst.params, inst.potential, h);
            const double dj = directional_cost_derivative(adj_state, lin_adj, inst.cost, grid, tgrid);
            pr.duality_gap = std::abs(pr.adjoint_derivative - dj) / std::max(1.0, std::abs(pr.adjoint_derivative));

            auto in_band = [&](const std::optional<double>& s) {
                return !s || (*s >= opt.slope_min && *s <= opt.slope_max);
            };
            pr.rel_ok = pr.rel_error <= opt.rel_tol;
            pr.slope_ok = in_band(pr.cost_slope) && in_band(pr.state_slope);
            pr.gap_ok = pr.duality_gap <= opt.gap_tol;
        } catch (const Error& e) {
            pr.error = e.what();
        }
        rep.worst_rel_error = std::max(rep.worst_rel_error, pr.rel_error);
        rep.worst_gap = std::max(rep.worst_gap, pr.duality_gap);
        rep.rel_ok = rep.rel_ok && pr.rel_ok;
        rep.slope_ok = rep.slope_ok && pr.slope_ok;
        rep.gap_ok = rep.gap_ok && pr.gap_ok;
        rep.probes.push_back(std::move(pr));
    }
    rep.passed = rep.rel_ok && rep.slope_ok && rep.gap_ok;
    return rep;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1]) && !(v[i] == 0.0 && v[i - 1] == 0.0)) return false;
    }
    return true;
}

EpsilonSweepReport epsilon_sweep(const Instance& inst, const std::vector<double>& epsilons) {
    if (!inst.potential.domain().bounded()) {
        throw InvalidArgument("epsilon_sweep: needs a potential with a bounded domain");
    }
    if (epsilons.empty()) throw InvalidArgument("epsilon_sweep: empty epsilon list");
    EpsilonSweepReport rep;
    rep.seed = inst.seed;
    rep.epsilons = epsilons;

    const auto& grid = inst.grid;
    const auto& tgrid = inst.tgrid;
    const StateTrajectory direct = solve_state(grid, tgrid, inst.params, inst.potential, std::nullopt,
                                               inst.control, inst.init, inst.options);
    std::vector<StateTrajectory> runs;
    for (double eps : epsilons) {
        Regularization reg;
        reg.epsilon = eps;
        runs.push_back(solve_state(grid, tgrid, inst.params, inst.potential, reg, inst.control, inst.init,
                                   inst.options));
        rep.phi_to_direct.push_back(norm_l2_h(grid, tgrid, difference(runs.back().phi, direct.phi)));
        rep.theta_to_direct.push_back(norm_l2_h(grid, tgrid, difference(runs.back().theta, direct.theta)));
    }
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        rep.phi_successive.push_back(norm_l2_h(grid, tgrid, difference(runs[i].phi, runs[i + 1].phi)));
        rep.theta_successive.push_back(norm_l2_h(grid, tgrid, difference(runs[i].theta, runs[i + 1].theta)));
    }
    rep.successive_decreasing = strictly_decreasing(rep.phi_successive);
    rep.direct_decreasing = strictly_decreasing(rep.phi_to_direct);
    rep.passed = rep.successive_decreasing && rep.direct_decreasing;
    return rep;
}

ContdepReport contdep_probe(const Instance& inst, int n_pairs, const std::vector<double>& separations,
                            double band_limit) {
    const ControlProblem problem = inst.problem();
    const auto& grid = inst.grid;
    const auto& tgrid = inst.tgrid;
    ContdepReport rep;
    rep.seed = inst.seed;
    rep.band_limit = band_limit;
    Rng rng(inst.seed ^ 0xc0ffee1234ULL);

    for (int p = 0; p < n_pairs; ++p) {
        const BoundaryControl u1 = project(
            random_control(grid, tgrid, rng, -1.0, 1.0), inst.bounds);
        BoundaryControl d = random_control(grid, tgrid, rng, -1.0, 1.0);
        const double dn = control_norm(grid, tgrid, d);
        if (dn == 0.0) continue;
        d = (1.0 / dn) * d;
        const StateTrajectory s1 = problem.solve(u1);

        ContdepPair pair;
        for (double sep : separations) {
            if (!(sep > 0.0)) continue;
            const BoundaryControl u2 = u1 + sep * d;
            const double du = control_norm(grid, tgrid, u2 - u1);
            if (du == 0.0) continue;
            const StateTrajectory s2 = problem.solve(u2);
            const double ds = norm_contdep(grid, tgrid, difference(s2.theta, s1.theta),
                                           difference(s2.theta_gamma, s1.theta_gamma),
                                           difference(s2.phi, s1.phi));
            pair.separations.push_back(sep);
            pair.ratios.push_back(ds / du);
        }
        if (!pair.ratios.empty()) {
            const auto [lo, hi] = std::minmax_element(pair.ratios.begin(), pair.ratios.end());
            pair.band = *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? INFINITY : 1.0);
        }
        rep.worst_band = std::max(rep.worst_band, pair.band);
        rep.pairs.push_back(std::move(pair));
    }
    rep.passed = rep.worst_band <= band_limit;
    return rep;
}

BoundedAuditReport bounded_audit(const Instance& inst, int n_random, double envelope, double margin) {
    const ControlProblem problem = inst.problem();
    BoundedAuditReport rep;
    rep.seed = inst.seed;
    rep.envelope = envelope;
    Rng rng(inst.seed ^ 0xb0b0b0b0ULL);

    std::vector<std::pair<std::string, BoundaryControl>> controls;
    controls.emplace_back("u_min", inst.bounds.u_min);
    controls.emplace_back("u_max", inst.bounds.u_max);
    for (int i = 0; i < n_random; ++i) {
        BoundaryControl u = inst.bounds.u_min;
        for (int n = 0; n < u.steps(); ++n) {
            for (Eigen::Index b = 0; b < u[n].size(); ++b) {
                u[n][b] = uniform(rng, 0.0, 1.0) * (inst.bounds.u_max[n][b] - inst.bounds.u_min[n][b]) +
                          inst.bounds.u_min[n][b];
            }
        }
        controls.emplace_back("random " + std::to_string(i), project(u, inst.bounds));
    }

    const auto& dom = inst.potential.domain();
    const bool singular = dom.bounded() && !inst.regularization;
    if (singular) rep.phi_interior = true;
    const double m_max = inst.params.m.size() ? inst.params.m.cwiseAbs().maxCoeff() : 0.0;
    const double init_norm = std::max(inst.init.theta0.cwiseAbs().maxCoeff(), inst.init.phi0.cwiseAbs().maxCoeff());

    for (auto& [label, u] : controls) {
        const StateTrajectory st = problem.solve(u);
        AuditEntry e;
        e.label = label;
        e.report = boundedness_check(st, singular ? std::optional(std::make_pair(dom.lower + margin, dom.upper - margin))
                                                  : std::nullopt);
        e.data_norm = std::max(init_norm, m_max * control_max_abs(u));
        rep.max_abs_theta = std::max(rep.max_abs_theta, e.report.max_abs_theta);
        rep.data_norm = std::max(rep.data_norm, e.data_norm);
        rep.theta_bounded = rep.theta_bounded && e.report.max_abs_theta <= envelope * e.data_norm;
        if (singular) rep.phi_interior = *rep.phi_interior && e.report.contained.value_or(false);
        rep.guard_rejections += st.guard_rejections();
        rep.entries.push_back(std::move(e));
    }
    rep.passed = rep.theta_bounded && rep.phi_interior.value_or(true);
    return rep;
}

}  // namespace pfc
