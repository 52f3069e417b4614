#include "pfc/errors.hpp"
#include "pfc/geometry.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace {

using namespace pfc;

Field sample(const SpatialGrid& g, auto&& f) {
    Field v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(i, 0);
        const double y = g.axes() == 2 ? g.coordinate(i, 1) : 0.0;
        v[i] = f(x, y);
    }
    return v;
}

TEST(Geometry, RejectsGridsWithoutInteriorNodes) {
    EXPECT_THROW(build_grid(Dimension::interval, {1.0}, {2}), InvalidArgument);
    EXPECT_THROW(build_grid(Dimension::rectangle, {1.0, 1.0}, {5, 2}), InvalidArgument);
    EXPECT_THROW(build_grid(Dimension::interval, {0.0}, {5}), InvalidArgument);
    EXPECT_THROW(build_grid(Dimension::interval, {1.0, 1.0}, {5}), InvalidArgument);
}

TEST(Geometry, IntervalQuadratureIsExactForLinears) {
    const auto g = build_grid(Dimension::interval, {2.0}, {5});
    EXPECT_DOUBLE_EQ(integrate_domain(g, Field::Ones(5)), 2.0);
    EXPECT_DOUBLE_EQ(integrate_domain(g, sample(g, [](double x, double) { return x; })), 2.0);
    EXPECT_EQ(g.boundary_size(), 2u);
    EXPECT_DOUBLE_EQ(integrate_boundary(g, BoundaryField::Ones(2)), 2.0);
    EXPECT_DOUBLE_EQ(g.measure(), 2.0);
    EXPECT_DOUBLE_EQ(g.boundary_measure(), 2.0);
}

TEST(Geometry, RectangleMeasuresAndOrdering) {
    const auto g = build_grid(Dimension::rectangle, {1.0, 2.0}, {5, 9});
    EXPECT_EQ(g.size(), 45u);
    EXPECT_EQ(g.boundary_size(), 2u * 5 + 2u * 9 - 4);
    EXPECT_NEAR(integrate_domain(g, Field::Ones(45)), 2.0, 1e-14);
    EXPECT_NEAR(integrate_boundary(g, BoundaryField::Ones(g.boundary_size())), 6.0, 1e-14);
    // node (i, j) sits at i + nx j
    EXPECT_DOUBLE_EQ(g.coordinate(3 + 5 * 4, 0), 0.75);
    EXPECT_DOUBLE_EQ(g.coordinate(3 + 5 * 4, 1), 1.0);
    EXPECT_EQ(g.boundary_index(1 + 5 * 1), -1);
    EXPECT_GE(g.boundary_index(0), 0);
    const auto nodes = g.boundary_nodes();
    EXPECT_TRUE(std::is_sorted(nodes.begin(), nodes.end()));
}

TEST(Geometry, TraceAndEmbedAreAdjointRestrictions) {
    const auto g = build_grid(Dimension::rectangle, {1.0, 1.0}, {4, 3});
    const Field f = sample(g, [](double x, double y) { return 1.0 + x + 10.0 * y; });
    const BoundaryField t = trace(g, f);
    const Field e = embed(g, t);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const long b = g.boundary_index(i);
        EXPECT_DOUBLE_EQ(e[i], b < 0 ? 0.0 : f[i]);
    }
    EXPECT_EQ(trace(g, e), t);
}

TEST(Geometry, StiffnessKillsConstantsAndIsSymmetric) {
    for (auto g : {build_grid(Dimension::interval, {1.0}, {7}),
                   build_grid(Dimension::rectangle, {1.0, 0.5}, {6, 4})}) {
        const auto A = stiffness_matrix(g);
        EXPECT_NEAR((A * Field::Ones(g.size())).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
        EXPECT_NEAR((Eigen::MatrixXd(A) - Eigen::MatrixXd(A).transpose()).norm(), 0.0, 0.0);
        const Field f = Field::LinSpaced(g.size(), -1.0, 2.0);
        EXPECT_NEAR((apply_stiffness(g, f) - A * f).norm(), 0.0, 1e-12);
    }
}

TEST(Geometry, DirichletEnergyExactForAffineFields) {
    const auto g1 = build_grid(Dimension::interval, {3.0}, {7});
    EXPECT_NEAR(dirichlet_energy(g1, sample(g1, [](double x, double) { return 2.0 * x; })), 4.0 * 3.0, 1e-12);
    const auto g2 = build_grid(Dimension::rectangle, {1.0, 2.0}, {5, 7});
    // |grad (x + 2y)|^2 = 5 over an area of 2
    EXPECT_NEAR(dirichlet_energy(g2, sample(g2, [](double x, double y) { return x + 2.0 * y; })), 10.0, 1e-12);
}

TEST(Geometry, LaplacianOfQuadraticWithMatchingFlux) {
    const auto g = build_grid(Dimension::interval, {1.0}, {9});
    const Field f = sample(g, [](double x, double) { return x * x; });
    BoundaryField flux(2);
    flux << 0.0, 2.0;  // outward derivatives at x = 0 and x = 1
    const Field lap = discrete_laplacian(g, f, flux);
    EXPECT_NEAR((lap - Field::Constant(9, 2.0)).lpNorm<Eigen::Infinity>(), 0.0, 1e-10);
}

TEST(Geometry, LaplacianOnSquareWithCornerFluxAverages) {
    const double L = 1.0;
    const auto g = build_grid(Dimension::rectangle, {L, L}, {5, 5});
    const Field f = sample(g, [](double x, double y) { return x * x + y * y; });
    BoundaryField flux(g.boundary_size());
    for (std::size_t b = 0; b < g.boundary_size(); ++b) {
        const auto node = g.boundary_nodes()[b];
        const double x = g.coordinate(node, 0), y = g.coordinate(node, 1);
        double sum = 0.0;
        int sides = 0;
        if (x == 0.0) { sum += 0.0; ++sides; }
        if (x == L) { sum += 2.0 * L; ++sides; }
        if (y == 0.0) { sum += 0.0; ++sides; }
        if (y == L) { sum += 2.0 * L; ++sides; }
        flux[b] = sum / sides;
    }
    const Field lap = discrete_laplacian(g, f, flux);
    EXPECT_NEAR((lap - Field::Constant(g.size(), 4.0)).lpNorm<Eigen::Infinity>(), 0.0, 1e-10);
}

TEST(Geometry, HomogeneousNeumannLaplacianIsMinusMassInverseStiffness) {
    const auto g = build_grid(Dimension::rectangle, {1.0, 1.0}, {4, 5});
    const Field f = Field::LinSpaced(g.size(), 0.0, 1.0).array().sin();
    const Field lap = discrete_laplacian(g, f, BoundaryField::Zero(g.boundary_size()));
    const Field mass = Eigen::Map<const Field>(g.interior_weights().data(), g.size());
    EXPECT_NEAR((mass.cwiseProduct(lap) + apply_stiffness(g, f)).norm(), 0.0, 1e-12);
}

TEST(Geometry, TimeConvolutionAndWeights) {
    const TimeGrid t(2.0, 8);
    const auto w = time_weights(t);
    EXPECT_DOUBLE_EQ(std::accumulate(w.begin(), w.end(), 0.0), 2.0);
    EXPECT_DOUBLE_EQ(w.front(), 0.125);
    std::vector<double> ones(9, 1.0), lin(9);
    for (int k = 0; k <= 8; ++k) lin[k] = t.time(k);
    const auto c1 = convolve_time(t, ones);
    const auto c2 = convolve_time(t, lin);
    for (int k = 0; k <= 8; ++k) {
        EXPECT_NEAR(c1[k], t.time(k), 1e-14);
        EXPECT_NEAR(c2[k], 0.5 * t.time(k) * t.time(k), 1e-14);
    }
    EXPECT_THROW(TimeGrid(1.0, 0), InvalidArgument);
}

}  // namespace
