#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace lowregret {

/// Raised when inputs violate a documented precondition (degenerate grids,
/// out-of-range parameters, mismatched dimensions).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Field on the interior nodes of a SpatialGrid.
using SpatialField = Eigen::VectorXd;

/// Space-time field: row m is the time slice t = m*dt, column i the node x_i.
/// Rows run 0..M, so a field over a TimeGrid with M steps has M+1 rows.
using SpaceTimeField =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform grid of n interior nodes on (x_l, x_r). The nodes x_l and x_r
/// themselves are not unknowns: fields vanish there and outside.
struct SpatialGrid {
    double x_l = 0.0;
    double x_r = 0.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> nodes;

    double length() const { return x_r - x_l; }
};

struct TimeGrid {
    double T = 0.0;
    int M = 0;
    double dt = 0.0;
    std::vector<double> times;
};

SpatialGrid build_grid(double x_l, double x_r, int n);
TimeGrid build_time_grid(double T, int M);

SpatialField zero_spatial(const SpatialGrid& grid);
SpaceTimeField zero_spacetime(const SpatialGrid& grid, const TimeGrid& tgrid);

/// h * sum_i a_i b_i
double inner_product_omega(const SpatialField& a, const SpatialField& b,
                           const SpatialGrid& grid);

/// h * dt * sum_{m=1..M} sum_i a^m_i b^m_i. The t = 0 slice carries no
/// quadrature weight (right-endpoint rule).
double inner_product_Q(const SpaceTimeField& a, const SpaceTimeField& b,
                       const SpatialGrid& grid, const TimeGrid& tgrid);

double norm_omega(const SpatialField& a, const SpatialGrid& grid);
double norm_Q(const SpaceTimeField& a, const SpatialGrid& grid, const TimeGrid& tgrid);

void check_dims(const SpatialField& a, const SpatialGrid& grid, const std::string& what);
void check_dims(const SpaceTimeField& a, const SpatialGrid& grid, const TimeGrid& tgrid,
                const std::string& what);

}  // namespace lowregret
