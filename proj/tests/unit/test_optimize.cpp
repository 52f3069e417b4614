#include "pfc/errors.hpp"
#include "pfc/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace {

using namespace pfc;

StateTrajectory constant_state(const SpatialGrid& g, const TimeGrid& t, double theta, double phi) {
    StateTrajectory s;
    for (int k = 0; k <= t.steps(); ++k) {
        s.theta.push_back(Field::Constant(g.size(), theta));
        s.phi.push_back(Field::Constant(g.size(), phi));
    }
    return s;
}

TEST(Cost, VanishesOnTheTarget) {
    const auto g = build_grid(Dimension::interval, {1.0}, {9});
    const TimeGrid t(1.0, 8);
    auto cost = CostSpec::zeros(g, t, 3.0, 5.0);
    for (auto& q : cost.theta_Q) q.setConstant(0.2);
    cost.phi_Omega.setConstant(-0.4);
    EXPECT_EQ(evaluate_cost(constant_state(g, t, 0.2, -0.4), cost, g, t), 0.0);
}

TEST(Cost, ProductOfMeasures) {
    const auto g = build_grid(Dimension::interval, {1.0}, {9});
    const TimeGrid t(1.0, 8);
    // kappa1/2 * |Q| with |theta - theta_Q| = 1
    EXPECT_NEAR(evaluate_cost(constant_state(g, t, 1.0, 0.0), CostSpec::zeros(g, t, 2.0, 0.0), g, t), 1.0, 1e-12);
    // kappa2/2 * |Omega| with |phi(T) - phi_Omega| = 1
    EXPECT_NEAR(evaluate_cost(constant_state(g, t, 0.0, 1.0), CostSpec::zeros(g, t, 0.0, 2.0), g, t), 1.0, 1e-12);
    const auto g2 = build_grid(Dimension::rectangle, {2.0, 0.5}, {5, 4});
    const TimeGrid t2(3.0, 6);
    EXPECT_NEAR(evaluate_cost(constant_state(g2, t2, 1.0, 0.0), CostSpec::zeros(g2, t2, 2.0, 0.0), g2, t2), 3.0, 1e-12);
}

class Box : public ::testing::Test {
protected:
    SpatialGrid g = build_grid(Dimension::interval, {1.0}, {5});
    TimeGrid t{1.0, 1};
    ControlBounds box = ControlBounds::constant(g, t, 0.0, 1.0);

    BoundaryControl pair(double a, double b) {
        BoundaryControl u = BoundaryControl::zeros(g, t);
        u[0] << a, b;
        return u;
    }
};

TEST_F(Box, ProjectClampsNodewise) {
    const auto u = pair(0.3, 0.9);
    EXPECT_EQ(project(u, box)[0], u[0]);
    EXPECT_EQ(project(pair(10.0, 10.0), box)[0], pair(1.0, 1.0)[0]);
    BoundaryControl v = BoundaryControl::zeros(g, TimeGrid(1.0, 3));
    v[0] << -5.0, 0.3;
    v[1] << 7.0, 0.3;
    v[2] << 0.0, 1.0;
    const auto p = project(v, ControlBounds::constant(g, TimeGrid(1.0, 3), 0.0, 1.0));
    EXPECT_EQ(p[0], (BoundaryField(2) << 0.0, 0.3).finished());
    EXPECT_EQ(p[1], (BoundaryField(2) << 1.0, 0.3).finished());
    EXPECT_EQ(p[2], v[2]);
}

TEST_F(Box, InvertedBoundsAreRejected) {
    const auto bad = ControlBounds::constant(g, t, 2.0, 1.0);
    EXPECT_THROW(bad.validate(g, t), InvalidArgument);
    EXPECT_THROW(project(pair(0.0, 0.0), bad), InvalidArgument);
}

TEST_F(Box, FixedPointIffTrichotomy) {
    // lower bound with s > 0, upper with s < 0, interior with s = 0
    const auto u = pair(0.0, 1.0);
    auto ggood = pair(0.7, -0.2);
    EXPECT_EQ(stationarity_residual(g, t, u, ggood, box), 0.0);
    const auto mid = pair(0.5, 0.25);
    EXPECT_EQ(stationarity_residual(g, t, mid, pair(0.0, 0.0), box), 0.0);
    EXPECT_GT(stationarity_residual(g, t, u, pair(-0.1, -0.2), box), 0.0);
    EXPECT_GT(stationarity_residual(g, t, mid, pair(0.0, 1e-3), box), 0.0);

    PhysicalParams params;
    params.m = BoundaryField::Ones(2);
    AdjointTrajectory adj;
    adj.p_gamma = {ggood[0], BoundaryField::Zero(2)};
    const auto cert = check_optimality(u, adj, params, box, g, t, 0.0);
    EXPECT_EQ(cert.satisfied_fraction, 1.0);
    EXPECT_EQ(cert.normal_cone_residual, 0.0);
    adj.p_gamma[0] << -0.1, -0.2;
    const auto bad = check_optimality(u, adj, params, box, g, t, 0.0);
    ASSERT_EQ(bad.violations.size(), 1u);
    EXPECT_EQ(bad.violations[0], std::make_pair(0, 0));
    // sup over y in [0,1] of 0.1 (y - 0) = 0.1, weighted by dt * w_b = 1
    EXPECT_NEAR(bad.normal_cone_residual, 0.1, 1e-15);
}

TEST(Optimizer, ZeroCostStopsAfterOneEvaluation) {
    InstanceRecipe r;
    r.kappa1 = 0.0;
    r.kappa2 = 0.0;
    const auto in = make_instance(r, 1);
    const auto rep = projected_gradient(in.control, in.bounds, in.problem(), in.cost);
    EXPECT_EQ(rep.evaluations, 1);
    EXPECT_EQ(rep.iterations, 0);
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(rep.residual_history.front(), 0.0);
    EXPECT_EQ(rep.certification.satisfied_fraction, 1.0);
    EXPECT_EQ(rep.certification.normal_cone_residual, 0.0);
}

TEST(Optimizer, DegenerateBoxReturnsThePoint) {
    const auto in = make_instance(InstanceRecipe{}, 2);
    const auto point = ControlBounds::constant(in.grid, in.tgrid, 0.3, 0.3);
    const auto rep = projected_gradient(in.control, point, in.problem(), in.cost);
    EXPECT_EQ(rep.iterations, 0);
    EXPECT_TRUE(rep.converged);
    for (int n = 0; n < rep.control.steps(); ++n) {
        EXPECT_EQ(rep.control[n], BoundaryField::Constant(2, 0.3));
        for (auto a : rep.active[n]) EXPECT_EQ(a, ActiveSet::lower);
    }
}

TEST(Optimizer, SelfTrackingRecoversTheTarget) {
    const auto in = make_self_tracking(InstanceRecipe{}, 3);
    OptimizeOptions opt;
    opt.s0 = 40.0;
    opt.tol = 1e-9;
    opt.max_iter = 3000;
    const auto rep = projected_gradient(in.control, in.bounds, in.problem(), in.cost, opt);
    ASSERT_TRUE(rep.converged) << rep.termination;
    EXPECT_LE(rep.residual_history.back(), 1e-6);
    EXPECT_LE(rep.cost_history.back(), 1e-6 * rep.cost_history.front());
    for (std::size_t i = 1; i < rep.cost_history.size(); ++i) {
        EXPECT_LE(rep.cost_history[i], rep.cost_history[i - 1]);
    }
    for (int n = 0; n < rep.control.steps(); ++n) {
        EXPECT_TRUE((rep.control[n].array() >= in.bounds.u_min[n].array()).all());
        EXPECT_TRUE((rep.control[n].array() <= in.bounds.u_max[n].array()).all());
    }
    EXPECT_GE(rep.certification.satisfied_fraction, 0.99);
    EXPECT_LE(rep.certification.normal_cone_residual, 10 * opt.tol);
}

TEST(Optimizer, ActiveBoundsAreCertified) {
    // a target reachable only outside the box pushes the optimum onto the bounds
    InstanceRecipe r;
    r.u_min = -0.1;
    r.u_max = 0.1;
    auto in = make_instance(r, 4);
    in.cost.kappa2 = 0.0;
    in.cost.theta_Q = in.problem().solve(BoundaryControl::constant(in.grid, in.tgrid, 0.8)).theta;
    OptimizeOptions opt;
    opt.s0 = 40.0;
    const auto rep = projected_gradient(in.control, in.bounds, in.problem(), in.cost, opt);
    ASSERT_TRUE(rep.converged) << rep.termination;
    int upper = 0;
    for (const auto& row : rep.active) upper += static_cast<int>(std::count(row.begin(), row.end(), ActiveSet::upper));
    EXPECT_GT(upper, 0);
    EXPECT_GE(rep.certification.satisfied_fraction, 0.99);
}

TEST(Optimizer, CostScalingWithMatchedStepGivesTheSameIterates) {
    const auto in = make_self_tracking(InstanceRecipe{}, 5);
    OptimizeOptions a;
    a.max_iter = 15;
    a.s0 = 8.0;
    auto scaled = in.cost;
    scaled.kappa1 *= 4.0;
    OptimizeOptions b = a;
    b.s0 /= 4.0;
    const auto ra = projected_gradient(in.control, in.bounds, in.problem(), in.cost, a);
    const auto rb = projected_gradient(in.control, in.bounds, in.problem(), scaled, b);
    ASSERT_EQ(ra.iterations, rb.iterations);
    for (int n = 0; n < ra.control.steps(); ++n) EXPECT_EQ(ra.control[n], rb.control[n]);
    for (std::size_t i = 0; i < ra.cost_history.size(); ++i) {
        EXPECT_EQ(4.0 * ra.cost_history[i], rb.cost_history[i]);
    }
}

TEST(Certification, PerturbedControlIsFlaggedExactlyWhereTheSignIsNonzero) {
    const auto in = make_self_tracking(InstanceRecipe{}, 6);
    const auto pb = in.problem();
    // u interior everywhere; impose a synthetic adjoint with nonzero sign at two pairs
    const BoundaryControl u = in.control;
    auto adj = pb.evaluate(u, in.cost).adjoint;
    for (auto& p : adj.p_gamma) p.setZero();
    adj.p_gamma[2][0] = 0.5;
    adj.p_gamma[5][1] = -0.25;
    const auto cert = check_optimality(u, adj, in.params, in.bounds, in.grid, in.tgrid);
    ASSERT_EQ(cert.violations.size(), 2u);
    EXPECT_EQ(cert.violations[0], std::make_pair(2, 0));
    EXPECT_EQ(cert.violations[1], std::make_pair(5, 1));
    EXPECT_EQ(cert.pairs, 2 * in.tgrid.steps());
    EXPECT_GT(cert.normal_cone_residual, 0.0);
}

}  // namespace
