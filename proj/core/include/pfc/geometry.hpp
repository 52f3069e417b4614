#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace pfc {

/// Nodal values on the spatial grid.
using Field = Eigen::VectorXd;
/// Nodal values on the boundary nodes, in boundary index order.
using BoundaryField = Eigen::VectorXd;
/// One Field per time node k = 0..N.
using SpaceTimeField = std::vector<Field>;
/// One BoundaryField per time node k = 0..N.
using BoundarySpaceTimeField = std::vector<BoundaryField>;

enum class Dimension { interval, rectangle };

/// Uniform tensor-product grid on [0,L] or [0,Lx]x[0,Ly].
///
/// Node (i, j) of a rectangle has linear index i + nx * j. Volume weights are
/// the trapezoid weights; boundary weights are the counting measure in 1D and
/// the edge trapezoid rule in 2D. The stiffness form is the symmetric
/// five-point (three-point in 1D) finite-volume form whose lumped-mass quotient
/// reproduces the centered stencil with ghost-node Neumann elimination.
class SpatialGrid {
public:
    struct Edge {
        std::size_t a;
        std::size_t b;
        double coeff;
    };

    Dimension dimension() const { return dimension_; }
    int axes() const { return dimension_ == Dimension::interval ? 1 : 2; }
    double length(int axis) const { return lengths_[axis]; }
    int node_count(int axis) const { return counts_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }

    std::size_t size() const { return weights_.size(); }
    std::size_t boundary_size() const { return boundary_nodes_.size(); }

    std::span<const double> interior_weights() const { return weights_; }
    std::span<const std::size_t> boundary_nodes() const { return boundary_nodes_; }
    std::span<const double> boundary_weights() const { return boundary_weights_; }
    std::span<const Edge> edges() const { return edges_; }

    double coordinate(std::size_t node, int axis) const;
    double measure() const;
    double boundary_measure() const;

    /// Position of `node` in the boundary list, or -1 for an interior node.
    long boundary_index(std::size_t node) const { return boundary_index_[node]; }

    friend SpatialGrid build_grid(Dimension, std::vector<double>, std::vector<int>);

private:
    SpatialGrid() = default;

    Dimension dimension_ = Dimension::interval;
    std::array<double, 2> lengths_{};
    std::array<int, 2> counts_{1, 1};
    std::array<double, 2> spacing_{};
    std::vector<double> weights_;
    std::vector<std::size_t> boundary_nodes_;
    std::vector<double> boundary_weights_;
    std::vector<long> boundary_index_;
    std::vector<Edge> edges_;
};

/// Uniform time grid t_k = k * dt, k = 0..N.
class TimeGrid {
public:
    TimeGrid(double horizon, int steps);

    double horizon() const { return horizon_; }
    int steps() const { return steps_; }
    double dt() const { return horizon_ / steps_; }
    double time(int k) const { return k * dt(); }

private:
    double horizon_;
    int steps_;
};

SpatialGrid build_grid(Dimension dimension, std::vector<double> lengths,
                       std::vector<int> node_counts);

double integrate_domain(const SpatialGrid& grid, const Field& field);
double integrate_boundary(const SpatialGrid& grid, const BoundaryField& field);

BoundaryField trace(const SpatialGrid& grid, const Field& field);
/// Extends a boundary field by zero to the whole grid.
Field embed(const SpatialGrid& grid, const BoundaryField& field);

/// Stiffness form A applied to `field`: (A f)_i = sum over edges of coeff (f_i - f_j).
Field apply_stiffness(const SpatialGrid& grid, const Field& field);
/// f^T A f, the discrete Dirichlet energy.
double dirichlet_energy(const SpatialGrid& grid, const Field& field);
Eigen::SparseMatrix<double> stiffness_matrix(const SpatialGrid& grid);

/// Centered Laplacian with an outward normal-derivative flux imposed at the
/// boundary nodes by ghost-node elimination. Zero flux gives homogeneous Neumann.
Field discrete_laplacian(const SpatialGrid& grid, const Field& field,
                         const BoundaryField& neumann_flux);

/// (1*v)(t_k) by the cumulative trapezoid rule; the value at node 0 is 0.
std::vector<double> convolve_time(const TimeGrid& tgrid, std::span<const double> series);
SpaceTimeField convolve_time(const TimeGrid& tgrid, const SpaceTimeField& series);

/// Trapezoid weights in time: dt/2 at both ends, dt inside.
std::vector<double> time_weights(const TimeGrid& tgrid);

}  // namespace pfc
