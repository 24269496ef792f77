#pragma once

#include "lowregret/grid.hpp"

#include <iosfwd>
#include <vector>

namespace lowregret {

/// C_{1,s} = s 2^{2s} Gamma((1+2s)/2) / (sqrt(pi) Gamma(1-s)), for 0 < s < 1.
double normalization_constant(double s);

/// Dense discretization of the integral fractional Laplacian (-Delta)^s on
/// a 1-D interval with homogeneous exterior Dirichlet data.
///
/// Row i of the matrix realizes, for a nodal field w extended by zero,
///
///   C_{1,s} * [ sum_{j != i} (w_i - w_j) h / |x_i - x_j|^{1+2s}
///             + w_i ((x_i - x_l)^{-2s} + (x_r - x_i)^{-2s}) / (2s)
///             - (w_{i-1} - 2 w_i + w_{i+1}) / h^2 * h^{2-2s} / (2-2s) ]
///
/// i.e. midpoint far field, exact exterior tail, and a Taylor correction for
/// the principal-value core with ghost values w_0 = w_{n+1} = 0.
class FracOperator {
public:
    FracOperator(const SpatialGrid& grid, double s);

    double s() const { return s_; }
    double c_ns() const { return c_ns_; }
    const SpatialGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int size() const { return grid_.n; }

    /// Unscaled exterior tail ((x_i - x_l)^{-2s} + (x_r - x_i)^{-2s}) / (2s).
    const Eigen::VectorXd& tail() const { return tail_; }
    /// Unscaled far-field weight h / (k h)^{1+2s} for node offset k >= 1.
    double far_weight(int offset) const;
    /// Unscaled coefficient h^{2-2s} / ((2-2s) h^2) of the second difference.
    double core_coefficient() const { return core_coeff_; }

    SpatialField apply(const SpatialField& w) const;

    /// Row-major dump preceded by a "# n s h" header line.
    void write_csv(std::ostream& out) const;

private:
    SpatialGrid grid_;
    double s_;
    double c_ns_;
    double core_coeff_;
    Eigen::VectorXd tail_;
    Eigen::MatrixXd matrix_;
};

FracOperator assemble_operator(const SpatialGrid& grid, double s);

/// A point of R \ [x_l, x_r]. Construction rejects points in the closed domain.
class ExteriorPoint {
public:
    ExteriorPoint(const SpatialGrid& grid, double x);
    double x() const { return x_; }

private:
    double x_;
};

/// N_s w(p) = -C_{1,s} sum_j w_j h / |p - x_j|^{1+2s} for w vanishing outside
/// the domain, so w(p) = 0.
double nonlocal_normal_derivative(const FracOperator& op, const SpatialField& w,
                                  const ExteriorPoint& p);

/// Quadrature node on the exterior with the value of v there.
struct ExteriorNode {
    double x = 0.0;
    double weight = 0.0;
    double v = 0.0;
};

/// Log-graded Gauss-Legendre rule covering (x_r, x_r + far) and (x_l - far, x_l),
/// with far = decades above the domain length; v is zero at every node.
std::vector<ExteriorNode> exterior_quadrature(const SpatialGrid& grid,
                                              int panels_per_side = 40,
                                              double decades = 10.0);

/// Discrete energy form
///   E(w, v) = (C/2) sum_{i != j} (w_i - w_j)(v_i - v_j) h^2 / |x_i - x_j|^{1+2s}
///           + C h c_core sum_{i=0..n} (w_{i+1} - w_i)(v_{i+1} - v_i)
///           + C sum_i h w_i sum_k wt_k (v_i - v(p_k)) / |x_i - p_k|^{1+2s}
/// with the exterior part integrated by the supplied nodes.
double energy_form(const FracOperator& op, const SpatialField& w, const SpatialField& v,
                   const std::vector<ExteriorNode>& exterior);

/// |E(w, v) - <v, A w>_Omega - sum_k wt_k v(p_k) N_s w(p_k)|.
double integration_by_parts_residual(const FracOperator& op, const SpatialField& w,
                                     const SpatialField& v,
                                     const std::vector<ExteriorNode>& exterior);

}  // namespace lowregret
