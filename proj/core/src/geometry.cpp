#include "pfc/geometry.hpp"

#include "pfc/errors.hpp"

#include <cmath>
#include <string>

namespace pfc {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw InvalidArgument(std::string(what) + ": expected " + std::to_string(want) +
                              " values, got " + std::to_string(got));
    }
}

}  // namespace

SpatialGrid build_grid(Dimension dimension, std::vector<double> lengths,
                       std::vector<int> node_counts) {
    const std::size_t axes = dimension == Dimension::interval ? 1 : 2;
    if (lengths.size() != axes || node_counts.size() != axes) {
        throw InvalidArgument("build_grid: need one length and one node count per axis");
    }
    SpatialGrid g;
    g.dimension_ = dimension;
    for (std::size_t a = 0; a < axes; ++a) {
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            throw InvalidArgument("build_grid: lengths must be positive and finite");
        }
        if (node_counts[a] < 3) {
            throw InvalidArgument("build_grid: node_counts must be >= 3 per axis (no interior node)");
        }
        g.lengths_[a] = lengths[a];
        g.counts_[a] = node_counts[a];
        g.spacing_[a] = lengths[a] / (node_counts[a] - 1);
    }

    const int nx = g.counts_[0];
    const double hx = g.spacing_[0];

    if (dimension == Dimension::interval) {
        g.weights_.assign(nx, hx);
        g.weights_.front() = g.weights_.back() = 0.5 * hx;
        g.boundary_nodes_ = {0, static_cast<std::size_t>(nx - 1)};
        g.boundary_weights_ = {1.0, 1.0};
        for (int i = 0; i + 1 < nx; ++i) {
            g.edges_.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1), 1.0 / hx});
        }
    } else {
        const int ny = g.counts_[1];
        const double hy = g.spacing_[1];
        auto half = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
        g.weights_.resize(static_cast<std::size_t>(nx) * ny);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = i + static_cast<std::size_t>(nx) * j;
                g.weights_[k] = hx * hy * half(i, nx) * half(j, ny);
                const bool on_x = (i == 0 || i == nx - 1);
                const bool on_y = (j == 0 || j == ny - 1);
                if (on_x || on_y) {
                    // edge trapezoid: each incident boundary edge contributes half its length
                    double w = 0.0;
                    if (on_x) w += hy * half(j, ny);
                    if (on_y) w += hx * half(i, nx);
                    g.boundary_nodes_.push_back(k);
                    g.boundary_weights_.push_back(w);
                }
                if (i + 1 < nx) g.edges_.push_back({k, k + 1, hy * half(j, ny) / hx});
                if (j + 1 < ny) g.edges_.push_back({k, k + nx, hx * half(i, nx) / hy});
            }
        }
    }

    g.boundary_index_.assign(g.weights_.size(), -1);
    for (std::size_t b = 0; b < g.boundary_nodes_.size(); ++b) {
        g.boundary_index_[g.boundary_nodes_[b]] = static_cast<long>(b);
    }
    return g;
}

double SpatialGrid::coordinate(std::size_t node, int axis) const {
    if (axis == 0) return spacing_[0] * static_cast<double>(node % counts_[0]);
    return spacing_[1] * static_cast<double>(node / counts_[0]);
}

double SpatialGrid::measure() const {
    return dimension_ == Dimension::interval ? lengths_[0] : lengths_[0] * lengths_[1];
}

double SpatialGrid::boundary_measure() const {
    return dimension_ == Dimension::interval ? 2.0 : 2.0 * (lengths_[0] + lengths_[1]);
}

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidArgument("TimeGrid: horizon must be positive");
    }
    if (steps < 1) throw InvalidArgument("TimeGrid: steps must be >= 1");
}

double integrate_domain(const SpatialGrid& grid, const Field& field) {
    require_size(field.size(), grid.size(), "integrate_domain");
    const auto w = grid.interior_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * field[i];
    return s;
}

double integrate_boundary(const SpatialGrid& grid, const BoundaryField& field) {
    require_size(field.size(), grid.boundary_size(), "integrate_boundary");
    const auto w = grid.boundary_weights();
    double s = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) s += w[b] * field[b];
    return s;
}

BoundaryField trace(const SpatialGrid& grid, const Field& field) {
    require_size(field.size(), grid.size(), "trace");
    const auto nodes = grid.boundary_nodes();
    BoundaryField out(nodes.size());
    for (std::size_t b = 0; b < nodes.size(); ++b) out[b] = field[nodes[b]];
    return out;
}

Field embed(const SpatialGrid& grid, const BoundaryField& field) {
    require_size(field.size(), grid.boundary_size(), "embed");
    Field out = Field::Zero(grid.size());
    const auto nodes = grid.boundary_nodes();
    for (std::size_t b = 0; b < nodes.size(); ++b) out[nodes[b]] = field[b];
    return out;
}

Field apply_stiffness(const SpatialGrid& grid, const Field& field) {
    require_size(field.size(), grid.size(), "apply_stiffness");
    Field out = Field::Zero(grid.size());
    for (const auto& e : grid.edges()) {
        const double flux = e.coeff * (field[e.a] - field[e.b]);
        out[e.a] += flux;
        out[e.b] -= flux;
    }
    return out;
}

double dirichlet_energy(const SpatialGrid& grid, const Field& field) {
    require_size(field.size(), grid.size(), "dirichlet_energy");
    double s = 0.0;
    for (const auto& e : grid.edges()) {
        const double d = field[e.a] - field[e.b];
        s += e.coeff * d * d;
    }
    return s;
}

Eigen::SparseMatrix<double> stiffness_matrix(const SpatialGrid& grid) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(4 * grid.edges().size());
    for (const auto& e : grid.edges()) {
        const auto a = static_cast<int>(e.a);
        const auto b = static_cast<int>(e.b);
        t.emplace_back(a, a, e.coeff);
        t.emplace_back(b, b, e.coeff);
        t.emplace_back(a, b, -e.coeff);
        t.emplace_back(b, a, -e.coeff);
    }
    const auto n = static_cast<int>(grid.size());
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

Field discrete_laplacian(const SpatialGrid& grid, const Field& field,
                         const BoundaryField& neumann_flux) {
    require_size(field.size(), grid.size(), "discrete_laplacian");
    require_size(neumann_flux.size(), grid.boundary_size(), "discrete_laplacian flux");
    Field out = -apply_stiffness(grid, field);
    const auto nodes = grid.boundary_nodes();
    const auto bw = grid.boundary_weights();
    for (std::size_t b = 0; b < nodes.size(); ++b) out[nodes[b]] += bw[b] * neumann_flux[b];
    const auto w = grid.interior_weights();
    for (std::size_t i = 0; i < w.size(); ++i) out[i] /= w[i];
    return out;
}

std::vector<double> convolve_time(const TimeGrid& tgrid, std::span<const double> series) {
    require_size(series.size(), static_cast<std::size_t>(tgrid.steps() + 1), "convolve_time");
    std::vector<double> out(series.size(), 0.0);
    const double dt = tgrid.dt();
    for (std::size_t k = 1; k < series.size(); ++k) {
        out[k] = out[k - 1] + 0.5 * dt * (series[k - 1] + series[k]);
    }
    return out;
}

SpaceTimeField convolve_time(const TimeGrid& tgrid, const SpaceTimeField& series) {
    require_size(series.size(), static_cast<std::size_t>(tgrid.steps() + 1), "convolve_time");
    SpaceTimeField out(series.size());
    out[0] = Field::Zero(series[0].size());
    const double dt = tgrid.dt();
    for (std::size_t k = 1; k < series.size(); ++k) {
        out[k] = out[k - 1] + 0.5 * dt * (series[k - 1] + series[k]);
    }
    return out;
}

std::vector<double> time_weights(const TimeGrid& tgrid) {
    std::vector<double> w(tgrid.steps() + 1, tgrid.dt());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace pfc
