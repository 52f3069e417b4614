#include "pfc/norms.hpp"

#include "pfc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pfc {

namespace {

double mass_sq(const SpatialGrid& grid, const Field& f) { return integrate_domain(grid, f.cwiseProduct(f)); }

void require_series(const TimeGrid& tgrid, std::size_t size) {
    if (size != static_cast<std::size_t>(tgrid.steps() + 1)) {
        throw InvalidArgument("norm: series must hold one value per time node");
    }
}

}  // namespace

double norm_h(const SpatialGrid& grid, const Field& f) { return std::sqrt(mass_sq(grid, f)); }

double norm_v(const SpatialGrid& grid, const Field& f) {
    return std::sqrt(mass_sq(grid, f) + dirichlet_energy(grid, f));
}

double norm_l2_h(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& f) {
    require_series(tgrid, f.size());
    const auto w = time_weights(tgrid);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * mass_sq(grid, f[k]);
    return std::sqrt(s);
}

double norm_l2_v(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& f) {
    require_series(tgrid, f.size());
    const auto w = time_weights(tgrid);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        s += w[k] * (mass_sq(grid, f[k]) + dirichlet_energy(grid, f[k]));
    }
    return std::sqrt(s);
}

double norm_linf_h(const SpatialGrid& grid, const SpaceTimeField& f) {
    double m = 0.0;
    for (const auto& fk : f) m = std::max(m, norm_h(grid, fk));
    return m;
}

double norm_linf_v(const SpatialGrid& grid, const SpaceTimeField& f) {
    double m = 0.0;
    for (const auto& fk : f) m = std::max(m, norm_v(grid, fk));
    return m;
}

double norm_h1_h(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& f) {
    const double l2 = norm_l2_h(grid, tgrid, f);
    double d = 0.0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
        d += mass_sq(grid, f[k + 1] - f[k]) / tgrid.dt();
    }
    return std::sqrt(l2 * l2 + d);
}

double norm_l2_sigma(const SpatialGrid& grid, const TimeGrid& tgrid, const BoundarySpaceTimeField& g) {
    require_series(tgrid, g.size());
    const auto w = time_weights(tgrid);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += w[k] * integrate_boundary(grid, g[k].cwiseProduct(g[k]));
    return std::sqrt(s);
}

double norm_y(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& theta,
              const BoundarySpaceTimeField& theta_gamma, const SpaceTimeField& phi) {
    return norm_l2_h(grid, tgrid, theta) + norm_linf_v(grid, convolve_time(tgrid, theta)) +
           norm_l2_sigma(grid, tgrid, theta_gamma) + norm_linf_h(grid, phi) +
           norm_l2_v(grid, tgrid, phi);
}

double norm_contdep(const SpatialGrid& grid, const TimeGrid& tgrid, const SpaceTimeField& theta,
                    const BoundarySpaceTimeField& theta_gamma, const SpaceTimeField& phi) {
    return norm_linf_h(grid, theta) + norm_linf_v(grid, convolve_time(tgrid, theta)) +
           norm_l2_sigma(grid, tgrid, theta_gamma) + norm_h1_h(grid, tgrid, phi) +
           norm_linf_v(grid, phi);
}

SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b) {
    if (a.size() != b.size()) throw InvalidArgument("difference: length mismatch");
    SpaceTimeField out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return out;
}

}  // namespace pfc
