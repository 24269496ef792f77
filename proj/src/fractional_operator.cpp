#include "lowregret/fractional_operator.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lowregret {

namespace {

void check_order(double s, const char* who) {
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream msg;
        msg << who << ": fractional order must lie in (0, 1), got s = " << s;
        throw DomainError(msg.str());
    }
}

}  // namespace

double normalization_constant(double s) {
    check_order(s, "normalization_constant");
    constexpr double sqrt_pi = 1.7724538509055160273;
    return s * std::pow(2.0, 2.0 * s) * std::tgamma(s + 0.5) /
           (sqrt_pi * std::tgamma(1.0 - s));
}

FracOperator::FracOperator(const SpatialGrid& grid, double s)
    : grid_(grid), s_(s), c_ns_(normalization_constant(s)) {
    const int n = grid_.n;
    const double h = grid_.h;
    const double two_s = 2.0 * s_;

    core_coeff_ = std::pow(h, 2.0 - two_s) / ((2.0 - two_s) * h * h);

    tail_.resize(n);
    for (int i = 0; i < n; ++i) {
        // Distances to the endpoints from the node index, so the tail is
        // mirror-symmetric bit for bit.
        const double left = (i + 1) * h;
        const double right = (n - i) * h;
        tail_(i) = (std::pow(left, -two_s) + std::pow(right, -two_s)) / two_s;
    }

    // far_weight depends only on |i - j|, which keeps the matrix exactly symmetric.
    std::vector<double> weights(static_cast<std::size_t>(n));
    for (int k = 1; k < n; ++k) weights[static_cast<std::size_t>(k)] = far_weight(k);

    matrix_ = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double wk = weights[static_cast<std::size_t>(std::abs(i - j))];
            matrix_(i, j) = -wk;
            row_sum += wk;
        }
        matrix_(i, i) = row_sum + tail_(i) + 2.0 * core_coeff_;
        if (i > 0) matrix_(i, i - 1) -= core_coeff_;
        if (i + 1 < n) matrix_(i, i + 1) -= core_coeff_;
    }
    matrix_ *= c_ns_;
}

double FracOperator::far_weight(int offset) const {
    const double h = grid_.h;
    return h / std::pow(offset * h, 1.0 + 2.0 * s_);
}

SpatialField FracOperator::apply(const SpatialField& w) const {
    check_dims(w, grid_, "FracOperator::apply");
    return matrix_ * w;
}

void FracOperator::write_csv(std::ostream& out) const {
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << "# n=" << grid_.n << " s=" << s_ << " h=" << grid_.h << "\n";
    for (int i = 0; i < grid_.n; ++i) {
        for (int j = 0; j < grid_.n; ++j) {
            if (j) out << ',';
            out << matrix_(i, j);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

FracOperator assemble_operator(const SpatialGrid& grid, double s) {
    check_order(s, "assemble_operator");
    if (grid.n < 1 || !(grid.h > 0.0)) throw DomainError("assemble_operator: invalid grid");
    return FracOperator(grid, s);
}

ExteriorPoint::ExteriorPoint(const SpatialGrid& grid, double x) : x_(x) {
    if (!std::isfinite(x) || (x >= grid.x_l && x <= grid.x_r)) {
        std::ostringstream msg;
        msg << "ExteriorPoint: x = " << x << " lies in the closed domain [" << grid.x_l
            << ", " << grid.x_r << "]";
        throw DomainError(msg.str());
    }
}

double nonlocal_normal_derivative(const FracOperator& op, const SpatialField& w,
                                  const ExteriorPoint& p) {
    const auto& grid = op.grid();
    check_dims(w, grid, "nonlocal_normal_derivative");
    const double power = 1.0 + 2.0 * op.s();
    double sum = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const double dist = std::abs(p.x() - grid.nodes[static_cast<std::size_t>(j)]);
        sum += w(j) / std::pow(dist, power);
    }
    return -op.c_ns() * grid.h * sum;
}

std::vector<ExteriorNode> exterior_quadrature(const SpatialGrid& grid, int panels_per_side,
                                              double decades) {
    if (panels_per_side < 1 || !(decades > 0.0)) {
        throw DomainError("exterior_quadrature: need panels >= 1 and decades > 0");
    }
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& absc = rule::abscissa();
    const auto& wts = rule::weights();

    // Expand the half-rule into the full symmetric rule on [-1, 1].
    std::vector<std::pair<double, double>> full;
    for (std::size_t k = 0; k < absc.size(); ++k) {
        full.emplace_back(absc[k], wts[k]);
        if (absc[k] != 0.0) full.emplace_back(-absc[k], wts[k]);
    }

    const double span = std::log(10.0) * decades;
    const double u_lo = std::log(grid.length()) - span;
    const double u_hi = std::log(grid.length()) + span;
    const double panel = (u_hi - u_lo) / panels_per_side;

    std::vector<ExteriorNode> nodes;
    nodes.reserve(2 * full.size() * static_cast<std::size_t>(panels_per_side));
    for (int side = 0; side < 2; ++side) {
        for (int p = 0; p < panels_per_side; ++p) {
            const double mid = u_lo + (p + 0.5) * panel;
            for (const auto& [xi, wi] : full) {
                const double u = mid + 0.5 * panel * xi;
                const double d = std::exp(u);
                const double weight = 0.5 * panel * wi * d;
                const double x = side == 0 ? grid.x_r + d : grid.x_l - d;
                nodes.push_back({x, weight, 0.0});
            }
        }
    }
    return nodes;
}

double energy_form(const FracOperator& op, const SpatialField& w, const SpatialField& v,
                   const std::vector<ExteriorNode>& exterior) {
    const auto& grid = op.grid();
    check_dims(w, grid, "energy_form");
    check_dims(v, grid, "energy_form");
    const int n = grid.n;
    const double h = grid.h;
    const double power = 1.0 + 2.0 * op.s();

    // Omega x Omega, each unordered pair once.
    double pairs = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            pairs += (w(i) - w(j)) * (v(i) - v(j)) * h * op.far_weight(j - i);
        }
    }

    double core = 0.0;
    for (int i = -1; i < n; ++i) {
        const double dw = (i + 1 < n ? w(i + 1) : 0.0) - (i >= 0 ? w(i) : 0.0);
        const double dv = (i + 1 < n ? v(i + 1) : 0.0) - (i >= 0 ? v(i) : 0.0);
        core += dw * dv;
    }
    core *= h * op.core_coefficient();

    // Omega x exterior appears twice in the symmetric double integral, which
    // cancels the factor 1/2.
    double cross = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = grid.nodes[static_cast<std::size_t>(i)];
        double inner = 0.0;
        for (const auto& node : exterior) {
            inner += node.weight * (v(i) - node.v) / std::pow(std::abs(xi - node.x), power);
        }
        cross += h * w(i) * inner;
    }
    return op.c_ns() * (pairs + core + cross);
}

double integration_by_parts_residual(const FracOperator& op, const SpatialField& w,
                                     const SpatialField& v,
                                     const std::vector<ExteriorNode>& exterior) {
    const auto& grid = op.grid();
    const double energy = energy_form(op, w, v, exterior);
    const double interior = inner_product_omega(v, op.apply(w), grid);
    double boundary = 0.0;
    for (const auto& node : exterior) {
        if (node.v == 0.0) continue;
        boundary +=
            node.weight * node.v * nonlocal_normal_derivative(op, w, ExteriorPoint(grid, node.x));
    }
    return std::abs(energy - interior - boundary);
}

}  // namespace lowregret
