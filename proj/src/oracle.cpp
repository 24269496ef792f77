#include "lowregret/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>

namespace lowregret::oracle {

namespace {

void check_order(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream msg;
        msg << "fractional order must lie in (0, 1), got s = " << s;
        throw DomainError(msg.str());
    }
}

int depth_for(int max_subdivisions) {
    int depth = 1;
    while ((1 << depth) < max_subdivisions && depth < 40) ++depth;
    return depth;
}

struct Accumulator {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

// Adaptive Gauss-Kronrod on a smooth piece.
void add_kronrod(Accumulator& acc, const Function1D& f, double a, double b,
                 const QuadratureSpec& spec) {
    if (!(b > a)) return;
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, static_cast<unsigned>(depth_for(spec.max_subdivisions)), spec.rel_tol, &err,
        &l1);
    acc.value += v;
    // Boost reports the error in the reference frame [-1, 1]; half the
    // length bounds the rescaling of every sub-panel.
    acc.error += err * 0.5 * (b - a);
    acc.l1 += l1;
}

// tanh-sinh on a piece whose integrand may be singular at the ends.
void add_tanh_sinh(Accumulator& acc, const Function1D& f, double a, double b,
                   const QuadratureSpec& spec) {
    if (!(b > a)) return;
    const auto levels = static_cast<std::size_t>(depth_for(spec.max_subdivisions));
    boost::math::quadrature::tanh_sinh<double> integrator(levels);
    double err = 0.0, l1 = 0.0;
    std::size_t used = 0;
    // The reported error is the change over the last level, which lags the
    // true error of a quadratically converging rule; asking for a tighter
    // stop costs one more level and makes the estimate meaningful.
    const double v = integrator.integrate(f, a, b, 1e-2 * spec.rel_tol, &err, &l1, &used);
    acc.value += v;
    acc.error += err;
    acc.l1 += l1;
}

void check_tolerance(const Accumulator& acc, const QuadratureSpec& spec, const char* who) {
    const double allowed = std::max(spec.abs_tol, spec.rel_tol * std::max(acc.l1, 1.0));
    if (!(acc.error <= allowed) || !std::isfinite(acc.value)) {
        std::ostringstream msg;
        msg << who << ": error estimate " << acc.error << " exceeds tolerance " << allowed;
        throw QuadratureError(msg.str());
    }
}

std::vector<double> sorted_cuts(std::vector<double> cuts, double lo, double hi) {
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                              [&](double c) { return !(c > lo && c < hi); }),
               cuts.end());
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace

QuadratureResult quadrature_apply(const Function1D& w, double x, double s,
                                  const QuadratureSpec& spec) {
    check_order(s);
    if (!(spec.abs_tol > 0.0 && spec.rel_tol > 0.0 && spec.singularity_split_radius > 0.0)) {
        throw DomainError("quadrature_apply: tolerances and split radius must be positive");
    }
    const double two_s = 2.0 * s;

    double r = spec.singularity_split_radius;
    for (const double b : spec.breakpoints) {
        const double d = std::abs(b - x);
        if (d > 0.0) r = std::min(r, 0.5 * d);
    }
    const double wx = w(x);
    const auto second_difference = [&](double t) { return 2.0 * wx - w(x + t) - w(x - t); };

    Accumulator acc;

    // Core [0, r): with t = r u^{1/(2-2s)} the integrand D(t) t^{-1-2s} dt
    // becomes r^{2-2s}/(2-2s) D(t)/t^2 du. Below t0 the second difference
    // loses digits, so D(t)/t^2 = a + b t^2 is fitted from two samples.
    const double t0 = 3e-2 * r;
    const double d1 = second_difference(t0);
    const double d2 = second_difference(0.5 * t0);
    const double b4 = (d1 - 4.0 * d2) / (0.75 * std::pow(t0, 4));
    const double a2 = (d1 - b4 * std::pow(t0, 4)) / (t0 * t0);
    const double core_power = 1.0 / (2.0 - two_s);
    const double core_scale = std::pow(r, 2.0 - two_s) / (2.0 - two_s);
    add_kronrod(
        acc,
        [&](double u) {
            const double t = r * std::pow(u, core_power);
            const double ratio = t < t0 ? a2 + b4 * t * t : second_difference(t) / (t * t);
            return core_scale * ratio;
        },
        0.0, 1.0, spec);

    // Far part: int_r^inf (2 w(x) - w(x+t) - w(x-t)) t^{-1-2s} dt
    //   = 2 w(x) r^{-2s}/(2s) - (r^{-2s}/(2s)) int_0^1 F(r v^{-1/(2s)}) dv.
    const double far_scale = std::pow(r, -two_s) / two_s;
    acc.value += 2.0 * wx * far_scale;
    std::vector<double> cuts;
    for (const double b : spec.breakpoints) {
        const double t_b = std::abs(b - x);
        if (t_b > r) cuts.push_back(std::pow(r / t_b, two_s));
    }
    const auto far_integrand = [&](double v) {
        const double t = r * std::pow(v, -1.0 / two_s);
        return -far_scale * (w(x + t) + w(x - t));
    };
    const auto pieces = sorted_cuts(cuts, 0.0, 1.0);
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
        add_tanh_sinh(acc, far_integrand, pieces[k], pieces[k + 1], spec);
    }

    check_tolerance(acc, spec, "quadrature_apply");
    const double c = normalization_constant_reference(s);
    return {c * acc.value, c * acc.error};
}

QuadratureResult normal_derivative_quadrature(const Function1D& w, double x_l, double x_r,
                                              double p, double s, const QuadratureSpec& spec) {
    check_order(s);
    if (p >= x_l && p <= x_r) {
        throw DomainError("normal_derivative_quadrature: point lies in the closed domain");
    }
    const double power = 1.0 + 2.0 * s;
    const auto integrand = [&](double y) { return w(y) / std::pow(std::abs(p - y), power); };
    Accumulator acc;
    const auto pieces = sorted_cuts(spec.breakpoints, x_l, x_r);
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
        add_tanh_sinh(acc, integrand, pieces[k], pieces[k + 1], spec);
    }
    check_tolerance(acc, spec, "normal_derivative_quadrature");
    const double c = normalization_constant_reference(s);
    return {-c * acc.value, c * acc.error};
}

double normalization_constant_reference(double s) {
    check_order(s);
    using big = boost::multiprecision::cpp_bin_float_50;
    const big bs(s);
    const big value = bs * boost::multiprecision::pow(big(2), 2 * bs) *
                      boost::math::tgamma(bs + big(0.5)) /
                      (boost::multiprecision::sqrt(boost::math::constants::pi<big>()) *
                       boost::math::tgamma(big(1) - bs));
    return value.convert_to<double>();
}

double power_profile_constant(double s) {
    check_order(s);
    using big = boost::multiprecision::cpp_bin_float_50;
    const big bs(s);
    const big value = boost::multiprecision::pow(big(2), 2 * bs) *
                      boost::math::tgamma(bs + big(0.5)) * boost::math::tgamma(bs + big(1)) /
                      boost::multiprecision::sqrt(boost::math::constants::pi<big>());
    return value.convert_to<double>();
}

Eigen::VectorXd flatten_controls(const SpaceTimeField& v) {
    const auto M = v.rows() - 1;
    const auto n = v.cols();
    Eigen::VectorXd x(M * n);
    for (Eigen::Index m = 1; m <= M; ++m) x.segment((m - 1) * n, n) = v.row(m).transpose();
    return x;
}

SpaceTimeField unflatten_controls(const Eigen::VectorXd& x, const SpatialGrid& grid,
                                  const TimeGrid& tgrid) {
    const int n = grid.n;
    if (x.size() != static_cast<Eigen::Index>(n) * tgrid.M) {
        throw DomainError("unflatten_controls: size mismatch");
    }
    SpaceTimeField v = zero_spacetime(grid, tgrid);
    for (int m = 1; m <= tgrid.M; ++m) v.row(m) = x.segment((m - 1) * n, n).transpose();
    return v;
}

DenseReducedSystem dense_reduced_hessian(const RegretProblem& p) {
    const int n = p.grid().n;
    const int M = p.tgrid().M;
    const double h = p.grid().h;
    const double dt = p.tgrid().dt;
    const int size = n * M;
    if (size > kDenseSizeCap) {
        throw DomainError("dense_reduced_hessian: n*M = " + std::to_string(size) +
                          " exceeds the cap of " + std::to_string(kDenseSizeCap));
    }

    const Eigen::MatrixXd step =
        Eigen::MatrixXd::Identity(n, n) + dt * p.op().matrix();
    const Eigen::MatrixXd B = step.partialPivLu().inverse();
    std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(M) + 1);
    powers[0] = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= M; ++k) powers[static_cast<std::size_t>(k)] = B * powers[k - 1];

    DenseReducedSystem sys;
    sys.S = Eigen::MatrixXd::Zero(size, size);
    for (int m = 1; m <= M; ++m) {
        for (int k = 1; k <= m; ++k) {
            sys.S.block((m - 1) * n, (k - 1) * n, n, n) =
                dt * powers[static_cast<std::size_t>(m - k + 1)];
        }
    }
    sys.R = Eigen::MatrixXd::Zero(n, size);
    for (int k = 1; k <= M; ++k) {
        sys.R.block(0, (k - 1) * n, n, n) = dt * powers[static_cast<std::size_t>(k)];
    }

    const Eigen::MatrixXd RS = sys.R * sys.S;
    sys.H = 2.0 * h * dt * (sys.S.transpose() * sys.S) +
            (2.0 * h / p.gamma()) * (RS.transpose() * RS);
    sys.H.diagonal().array() += 2.0 * h * dt * p.aleph();
    // Symmetrize away the round-off of the two products.
    sys.H = 0.5 * (sys.H + sys.H.transpose()).eval();

    const Eigen::VectorXd f = flatten_controls(p.config().f);
    const Eigen::VectorXd zd = flatten_controls(p.config().z_d);
    const Eigen::VectorXd miss = sys.S * f - zd;
    sys.b = -2.0 * h * dt * (sys.S.transpose() * miss);
    return sys;
}

SpaceTimeField dense_solve(const RegretProblem& p, const DenseReducedSystem& sys) {
    Eigen::LLT<Eigen::MatrixXd> llt(sys.H);
    if (llt.info() != Eigen::Success) {
        throw SolverError("dense_solve: reduced Hessian is not positive definite");
    }
    return unflatten_controls(llt.solve(sys.b), p.grid(), p.tgrid());
}

SpaceTimeField fd_gradient(const RegretProblem& p, const SpaceTimeField& v, double eps) {
    if (!(eps > 0.0)) throw DomainError("fd_gradient: eps must be positive");
    check_dims(v, p.grid(), p.tgrid(), "fd_gradient");
    const double weight = p.grid().h * p.tgrid().dt;
    SpaceTimeField grad = zero_spacetime(p.grid(), p.tgrid());
    SpaceTimeField probe = v;
    for (int m = 1; m <= p.tgrid().M; ++m) {
        for (int i = 0; i < p.grid().n; ++i) {
            const double saved = probe(m, i);
            probe(m, i) = saved + eps;
            const double up = eval_J_reduced(p, probe);
            probe(m, i) = saved - eps;
            const double down = eval_J_reduced(p, probe);
            probe(m, i) = saved;
            grad(m, i) = (up - down) / (2.0 * eps * weight);
        }
    }
    return grad;
}

std::string config_hash(const std::string& canonical) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

}  // namespace lowregret::oracle
