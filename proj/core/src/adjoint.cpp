#include "pfc/adjoint.hpp"

#include "pfc/errors.hpp"
#include "pfc/sensitivity.hpp"
#include "scheme.hpp"

#include <algorithm>
#include <cmath>

namespace pfc {

using detail::Scheme;

namespace {

struct Reversed {
    Field theta_bar;
    Field phi_bar;
};

// Transpose of one linearized substep. Covectors of the outputs in, covectors
// of the inputs out; multipliers of the theta rows are added to `mu_sum`.
Reversed reverse_substep(Scheme& s, const Substep& sub, Field theta_bar_end, Field phi_bar_end,
                         Field& mu_sum, int step) {
    const auto& nl = s.nonlin();
    const Field& M = s.mass();
    const double dt = sub.dt;
    const double tau = s.params().tau;
    const Field& ps = sub.phi_start;
    const auto nn = ps.size();
    const auto K = sub.sweeps.size();
    const auto& T = s.theta_solver(dt);

    std::vector<Field> a_bar(K, Field::Zero(nn));
    std::vector<Field> b_bar(K, Field::Zero(nn));
    b_bar[K - 1] += theta_bar_end;
    a_bar[K - 1] += phi_bar_end;

    Reversed in{Field::Zero(nn), Field::Zero(nn)};
    for (std::size_t kk = K; kk-- > 0;) {
        const Field& pk = sub.sweeps[kk].phi;
        const Field& lag = kk == 0 ? sub.theta_start : sub.sweeps[kk - 1].theta;

        const Field mu = T.solve(b_bar[kk]);
        if (T.info() != Eigen::Success) throw SolverError("adjoint theta solve failed", step);
        mu_sum += mu;
        for (Eigen::Index i = 0; i < nn; ++i) {
            const double lam = nl.lambda(pk[i]);
            const double coef = nl.lambda_prime(pk[i]) * (pk[i] - ps[i]) + lam;
            in.theta_bar[i] += (M[i] / dt + tau / dt * s.bmass()[i]) * mu[i];
            a_bar[kk][i] -= M[i] / dt * coef * mu[i];
            in.phi_bar[i] += M[i] / dt * lam * mu[i];
        }

        const Field nu =
            detail::factor_solve(s.phi_solver(), s.phi_jacobian(dt, pk), a_bar[kk], s.phi_pattern_ready);
        for (Eigen::Index i = 0; i < nn; ++i) {
            in.phi_bar[i] += M[i] * (1.0 / dt - nl.pi_prime(ps[i]) + lag[i] * nl.lambda_prime(ps[i])) * nu[i];
            const double t = M[i] * nl.lambda(ps[i]) * nu[i];
            if (kk > 0) b_bar[kk - 1][i] += t; else in.theta_bar[i] += t;
        }
    }
    return in;
}

}  // namespace

AdjointTrajectory solve_adjoint(const StateTrajectory& state, const SpatialGrid& grid,
                                const TimeGrid& tgrid, const PhysicalParams& params,
                                const PotentialSpec& potential, const CostSpec& cost) {
    cost.validate(grid, tgrid);
    if (state.steps() != tgrid.steps()) throw InvalidArgument("solve_adjoint: state/time grid mismatch");
    Scheme s(grid, params, Nonlinearity(potential, state.regularization));
    const Field& M = s.mass();
    const int N = tgrid.steps();
    const auto nn = static_cast<Eigen::Index>(grid.size());
    const auto w = time_weights(tgrid);

    AdjointTrajectory adj;
    adj.p.assign(N + 1, Field::Zero(nn));
    adj.q.assign(N + 1, Field::Zero(nn));

    Field theta_bar = cost.kappa1 * w[N] * M.cwiseProduct(state.theta[N] - cost.theta_Q[N]);
    Field phi_bar = cost.kappa2 * M.cwiseProduct(state.phi[N] - cost.phi_Omega);
    adj.q[N] = phi_bar.cwiseQuotient(M);

    for (int n = N - 1; n >= 0; --n) {
        Field mu_sum = Field::Zero(nn);
        const auto& recs = state.records[n];
        for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
            auto in = reverse_substep(s, *it, std::move(theta_bar), std::move(phi_bar), mu_sum, n);
            theta_bar = std::move(in.theta_bar);
            phi_bar = std::move(in.phi_bar);
        }
        adj.p[n] = mu_sum / tgrid.dt();
        adj.q[n] = phi_bar.cwiseQuotient(M);
        theta_bar += cost.kappa1 * w[n] * M.cwiseProduct(state.theta[n] - cost.theta_Q[n]);
    }
    for (const auto& f : adj.p) adj.p_gamma.push_back(trace(grid, f));
    return adj;
}

BoundaryControl gradient(const AdjointTrajectory& adjoint, const PhysicalParams& params) {
    BoundaryControl g;
    const int N = static_cast<int>(adjoint.p_gamma.size()) - 1;
    for (int n = 0; n < N; ++n) {
        g.values.push_back(params.alpha * params.m.cwiseProduct(adjoint.p_gamma[n]));
    }
    return g;
}

double duality_gap(const StateTrajectory& state, const SpatialGrid& grid, const TimeGrid& tgrid,
                   const PhysicalParams& params, const PotentialSpec& potential,
                   const CostSpec& cost, const BoundaryControl& h) {
    const auto adj = solve_adjoint(state, grid, tgrid, params, potential, cost);
    const double gh = control_inner(grid, tgrid, gradient(adj, params), h);
    const auto sens = solve_linearized(state, grid, tgrid, params, potential, h);
    const double dj = directional_cost_derivative(state, sens, cost, grid, tgrid);
    return std::abs(gh - dj) / std::max(1.0, std::abs(gh));
}

}  // namespace pfc
