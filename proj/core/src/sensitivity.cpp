#include "pfc/sensitivity.hpp"

#include "pfc/errors.hpp"
#include "scheme.hpp"

namespace pfc {

using detail::Scheme;

void CostSpec::validate(const SpatialGrid& grid, const TimeGrid& tgrid) const {
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0)) throw InvalidArgument("cost: kappa1, kappa2 must be >= 0");
    if (theta_Q.size() != static_cast<std::size_t>(tgrid.steps() + 1)) {
        throw InvalidArgument("cost: theta_Q needs one field per time node");
    }
    for (const auto& f : theta_Q) {
        if (static_cast<std::size_t>(f.size()) != grid.size()) throw InvalidArgument("cost: theta_Q size mismatch");
    }
    if (static_cast<std::size_t>(phi_Omega.size()) != grid.size()) {
        throw InvalidArgument("cost: phi_Omega size mismatch");
    }
}

CostSpec CostSpec::zeros(const SpatialGrid& grid, const TimeGrid& tgrid, double kappa1, double kappa2) {
    CostSpec c;
    c.kappa1 = kappa1;
    c.kappa2 = kappa2;
    c.theta_Q.assign(tgrid.steps() + 1, Field::Zero(grid.size()));
    c.phi_Omega = Field::Zero(grid.size());
    return c;
}

SensitivityTrajectory solve_linearized(const StateTrajectory& state, const SpatialGrid& grid,
                                       const TimeGrid& tgrid, const PhysicalParams& params,
                                       const PotentialSpec& potential, const BoundaryControl& h) {
    h.validate(grid, tgrid);
    if (state.steps() != tgrid.steps()) throw InvalidArgument("solve_linearized: state/time grid mismatch");
    Scheme s(grid, params, Nonlinearity(potential, state.regularization));
    const auto& nl = s.nonlin();
    const Field& M = s.mass();
    const double tau = params.tau;
    const double alpha = params.alpha;
    const Eigen::Index nn = static_cast<Eigen::Index>(grid.size());

    SensitivityTrajectory out;
    out.Theta.push_back(Field::Zero(nn));
    out.Phi.push_back(Field::Zero(nn));

    for (int n = 0; n < tgrid.steps(); ++n) {
        const Field he = alpha * s.control_weight().cwiseProduct(embed(grid, h[n]));
        Field dtheta = out.Theta.back();
        Field dphi = out.Phi.back();
        for (const auto& sub : state.records[n]) {
            const double dt = sub.dt;
            const Field& ps = sub.phi_start;
            const auto& T = s.theta_solver(dt);
            Field lag_d = dtheta;
            const Field* lag = &sub.theta_start;
            Field a, b;
            for (const auto& sw : sub.sweeps) {
                const Field& pk = sw.phi;
                Field rhs(nn);
                for (Eigen::Index i = 0; i < nn; ++i) {
                    rhs[i] = M[i] * ((1.0 / dt - nl.pi_prime(ps[i]) + (*lag)[i] * nl.lambda_prime(ps[i])) * dphi[i] +
                                     nl.lambda(ps[i]) * lag_d[i]);
                }
                a = detail::factor_solve(s.phi_solver(), s.phi_jacobian(dt, pk), rhs, s.phi_pattern_ready);

                Field rhs2(nn);
                for (Eigen::Index i = 0; i < nn; ++i) {
                    const double lam = nl.lambda(pk[i]);
                    const double coef = nl.lambda_prime(pk[i]) * (pk[i] - ps[i]) + lam;
                    rhs2[i] = (M[i] / dt + tau / dt * s.bmass()[i]) * dtheta[i] -
                              M[i] / dt * (coef * a[i] - lam * dphi[i]) + he[i];
                }
                b = T.solve(rhs2);
                if (T.info() != Eigen::Success) throw SolverError("linearized theta solve failed", n);
                lag_d = b;
                lag = &sw.theta;
            }
            dtheta = std::move(b);
            dphi = std::move(a);
        }
        out.Theta.push_back(std::move(dtheta));
        out.Phi.push_back(std::move(dphi));
    }
    for (const auto& f : out.Theta) out.Theta_gamma.push_back(trace(grid, f));
    return out;
}

double directional_cost_derivative(const StateTrajectory& state, const SensitivityTrajectory& sens,
                                   const CostSpec& cost, const SpatialGrid& grid,
                                   const TimeGrid& tgrid) {
    cost.validate(grid, tgrid);
    if (sens.Theta.size() != state.theta.size()) throw InvalidArgument("sensitivity/state length mismatch");
    const auto w = time_weights(tgrid);
    double d = 0.0;
    if (cost.kappa1 != 0.0) {
        for (std::size_t k = 0; k < state.theta.size(); ++k) {
            d += cost.kappa1 * w[k] *
                 integrate_domain(grid, (state.theta[k] - cost.theta_Q[k]).cwiseProduct(sens.Theta[k]));
        }
    }
    if (cost.kappa2 != 0.0) {
        d += cost.kappa2 *
             integrate_domain(grid, (state.phi.back() - cost.phi_Omega).cwiseProduct(sens.Phi.back()));
    }
    return d;
}

}  // namespace pfc
