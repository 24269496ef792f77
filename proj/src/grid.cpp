#include "lowregret/grid.hpp"

#include <cmath>
#include <sstream>

namespace lowregret {

SpatialGrid build_grid(double x_l, double x_r, int n) {
    if (!(std::isfinite(x_l) && std::isfinite(x_r)) || !(x_l < x_r)) {
        std::ostringstream msg;
        msg << "build_grid: need x_l < x_r, got (" << x_l << ", " << x_r << ")";
        throw DomainError(msg.str());
    }
    if (n < 1) {
        throw DomainError("build_grid: need at least one interior node, got n = " +
                          std::to_string(n));
    }
    SpatialGrid grid;
    grid.x_l = x_l;
    grid.x_r = x_r;
    grid.n = n;
    grid.h = (x_r - x_l) / static_cast<double>(n + 1);
    grid.nodes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid.nodes[static_cast<std::size_t>(i)] = x_l + (i + 1) * grid.h;
    }
    return grid;
}

TimeGrid build_time_grid(double T, int M) {
    if (!std::isfinite(T) || !(T > 0.0)) {
        std::ostringstream msg;
        msg << "build_time_grid: horizon must be positive, got T = " << T;
        throw DomainError(msg.str());
    }
    if (M < 1) {
        throw DomainError("build_time_grid: need at least one step, got M = " +
                          std::to_string(M));
    }
    TimeGrid tgrid;
    tgrid.T = T;
    tgrid.M = M;
    tgrid.dt = T / static_cast<double>(M);
    tgrid.times.resize(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        tgrid.times[static_cast<std::size_t>(m)] = m * tgrid.dt;
    }
    tgrid.times.back() = T;
    return tgrid;
}

SpatialField zero_spatial(const SpatialGrid& grid) { return SpatialField::Zero(grid.n); }

SpaceTimeField zero_spacetime(const SpatialGrid& grid, const TimeGrid& tgrid) {
    return SpaceTimeField::Zero(tgrid.M + 1, grid.n);
}

void check_dims(const SpatialField& a, const SpatialGrid& grid, const std::string& what) {
    if (a.size() != grid.n) {
        std::ostringstream msg;
        msg << what << ": spatial field has " << a.size() << " entries, grid has "
            << grid.n << " nodes";
        throw DomainError(msg.str());
    }
}

void check_dims(const SpaceTimeField& a, const SpatialGrid& grid, const TimeGrid& tgrid,
                const std::string& what) {
    if (a.rows() != tgrid.M + 1 || a.cols() != grid.n) {
        std::ostringstream msg;
        msg << what << ": space-time field is " << a.rows() << "x" << a.cols()
            << ", expected " << (tgrid.M + 1) << "x" << grid.n;
        throw DomainError(msg.str());
    }
}

double inner_product_omega(const SpatialField& a, const SpatialField& b,
                           const SpatialGrid& grid) {
    check_dims(a, grid, "inner_product_omega");
    check_dims(b, grid, "inner_product_omega");
    return grid.h * a.dot(b);
}

double inner_product_Q(const SpaceTimeField& a, const SpaceTimeField& b,
                       const SpatialGrid& grid, const TimeGrid& tgrid) {
    check_dims(a, grid, tgrid, "inner_product_Q");
    check_dims(b, grid, tgrid, "inner_product_Q");
    const auto rows = tgrid.M;
    const double sum =
        a.bottomRows(rows).cwiseProduct(b.bottomRows(rows)).sum();
    return grid.h * tgrid.dt * sum;
}

double norm_omega(const SpatialField& a, const SpatialGrid& grid) {
    return std::sqrt(inner_product_omega(a, a, grid));
}

double norm_Q(const SpaceTimeField& a, const SpatialGrid& grid, const TimeGrid& tgrid) {
    return std::sqrt(inner_product_Q(a, a, grid, tgrid));
}

}  // namespace lowregret
