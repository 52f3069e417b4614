#include "pfc/errors.hpp"
#include "pfc/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace pfc;

TEST(Harness, InstancesAreSeedDeterministic) {
    const auto a = make_instance(InstanceRecipe{}, 42);
    const auto b = make_instance(InstanceRecipe{}, 42);
    const auto c = make_instance(InstanceRecipe{}, 43);
    EXPECT_EQ(a.init.phi0, b.init.phi0);
    EXPECT_EQ(a.control[3], b.control[3]);
    EXPECT_NE(a.init.phi0, c.init.phi0);
    EXPECT_EQ(a.seed, 42u);
}

TEST(Harness, LoglogSlope) {
    const std::vector<double> d{1e-1, 1e-2, 1e-3};
    EXPECT_NEAR(*loglog_slope(d, {3e-2, 3e-4, 3e-6}, 0.0), 2.0, 1e-12);
    EXPECT_NEAR(*loglog_slope(d, {1e-1, 1e-2, 1e-3}, 0.0), 1.0, 1e-12);
    EXPECT_FALSE(loglog_slope(d, {0.0, 0.0, 1e-20}, 1e-15).has_value());
}

TEST(Harness, GradCheckPassesOnSelfTracking) {
    const auto in = make_self_tracking(InstanceRecipe{}, 7);
    const auto rep = grad_check(in);
    EXPECT_TRUE(rep.passed);
    EXPECT_EQ(rep.probes.size(), 5u);
    EXPECT_EQ(rep.seed, 7u);
    for (const auto& p : rep.probes) {
        EXPECT_TRUE(p.error.empty()) << p.error;
        ASSERT_TRUE(p.state_slope.has_value());
        EXPECT_NEAR(*p.state_slope, 2.0, 0.3);
    }
}

TEST(Harness, GradCheckTriviallyPassesWithoutCost) {
    InstanceRecipe r;
    r.kappa1 = 0.0;
    r.kappa2 = 0.0;
    const auto rep = grad_check(make_instance(r, 3));
    EXPECT_TRUE(rep.passed);
    for (const auto& p : rep.probes) {
        EXPECT_EQ(p.adjoint_derivative, 0.0);
        EXPECT_EQ(p.rel_error, 0.0);
        EXPECT_FALSE(p.cost_slope.has_value());
    }
}

TEST(Harness, InjectedFaultsAreDetected) {
    const auto in = make_instance(InstanceRecipe{}, 9);
    GradCheckOptions opt;
    opt.fault = Fault::negate_gradient;
    const auto neg = grad_check(in, opt);
    EXPECT_FALSE(neg.passed);
    EXPECT_NEAR(neg.worst_rel_error, 2.0, 1e-6);
    opt.fault = Fault::perturb_trajectory;
    EXPECT_FALSE(grad_check(in, opt).passed);
    EXPECT_EQ(parse_fault("negate-gradient"), Fault::negate_gradient);
    EXPECT_THROW(parse_fault("bogus"), InvalidArgument);
}

TEST(Harness, GradCheckReportIsReproducible) {
    const auto in = make_instance(InstanceRecipe{}, 10);
    const auto a = grad_check(in);
    const auto b = grad_check(in);
    ASSERT_EQ(a.probes.size(), b.probes.size());
    for (std::size_t i = 0; i < a.probes.size(); ++i) {
        EXPECT_EQ(a.probes[i].adjoint_derivative, b.probes[i].adjoint_derivative);
        EXPECT_EQ(a.probes[i].cost_remainders, b.probes[i].cost_remainders);
    }
}

TEST(Harness, EpsilonSweepOnZeroDataIsIdenticallyZero) {
    InstanceRecipe r;
    r.zero_data = true;
    const auto rep = epsilon_sweep(make_instance(r, 1), {0.2, 0.1, 0.05});
    for (double v : rep.phi_to_direct) EXPECT_EQ(v, 0.0);
    for (double v : rep.theta_successive) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(rep.passed);
}

TEST(Harness, EpsilonSweepConvergesMonotonically) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto rep = epsilon_sweep(make_instance(InstanceRecipe{}, seed), {0.2, 0.1, 0.05, 0.025});
        EXPECT_TRUE(rep.direct_decreasing) << seed;
        EXPECT_TRUE(rep.successive_decreasing) << seed;
    }
}

TEST(Harness, EpsilonSweepErrorPlateausUnderTimeRefinement) {
    // at fixed epsilon the distance to the direct solve comes from epsilon, not dt
    std::vector<double> dist;
    for (int steps : {64, 128, 256}) {
        InstanceRecipe r;
        r.steps = steps;
        dist.push_back(epsilon_sweep(make_instance(r, 2), {0.1}).phi_to_direct.front());
    }
    EXPECT_NEAR(dist[1] / dist[0], 1.0, 0.1);
    EXPECT_NEAR(dist[2] / dist[1], 1.0, 0.1);
    // the dt part shrinks geometrically, leaving the epsilon part
    EXPECT_LT(std::abs(dist[2] - dist[1]), 0.75 * std::abs(dist[1] - dist[0]));
}

TEST(Harness, EpsilonSweepNeedsASingularPotential) {
    InstanceRecipe r;
    r.variant = PotentialVariant::regular;
    EXPECT_THROW(epsilon_sweep(make_instance(r, 1), {0.1}), InvalidArgument);
}

TEST(Harness, ContdepRatioIsConstantInTheLinearRegime) {
    InstanceRecipe r;
    r.ell = 0.0;
    const auto rep = contdep_probe(make_instance(r, 4), 3);
    for (const auto& p : rep.pairs) {
        ASSERT_EQ(p.ratios.size(), 4u);
        EXPECT_LE(p.band, 1.01);
    }
}

TEST(Harness, ContdepBandOnLogarithmicInstance) {
    const auto rep = contdep_probe(make_instance(InstanceRecipe{}, 5), 10);
    EXPECT_EQ(rep.pairs.size(), 10u);
    EXPECT_TRUE(rep.passed);
    EXPECT_LE(rep.worst_band, 100.0);
}

TEST(Harness, ContdepSkipsCoincidentControls) {
    const auto rep = contdep_probe(make_instance(InstanceRecipe{}, 5), 1, {0.0, 1e-2});
    ASSERT_EQ(rep.pairs.size(), 1u);
    EXPECT_EQ(rep.pairs[0].ratios.size(), 1u);
}

TEST(Harness, BoundedAuditOnZeroData) {
    InstanceRecipe r;
    r.zero_data = true;
    r.u_min = 0.0;
    r.u_max = 0.0;
    const auto rep = bounded_audit(make_instance(r, 1), 3);
    EXPECT_EQ(rep.max_abs_theta, 0.0);
    EXPECT_TRUE(rep.passed);
}

TEST(Harness, BoundedAuditCornersAndRandomControls) {
    const auto rep = bounded_audit(make_instance(InstanceRecipe{}, 6), 10);
    EXPECT_EQ(rep.entries.size(), 12u);
    EXPECT_EQ(rep.entries[0].label, "u_min");
    EXPECT_TRUE(rep.theta_bounded);
    ASSERT_TRUE(rep.phi_interior.has_value());
    EXPECT_TRUE(*rep.phi_interior);
    EXPECT_EQ(rep.guard_rejections, 0);
    for (const auto& e : rep.entries) {
        EXPECT_GT(e.report.min_phi, -1.0 + 1e-6);
        EXPECT_LT(e.report.max_phi, 1.0 - 1e-6);
    }
}

}  // namespace
