#pragma once

// Brute-force references for the main solver path. Nothing here touches the
// assembled operator's quadrature or the CG solver; shared code is limited
// to grids and inner products.

#include "lowregret/regret.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lowregret::oracle {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    /// Refinement budget; bounds both the Kronrod bisection depth and the
    /// tanh-sinh level count.
    int max_subdivisions = 1 << 15;
    /// Radius of the principal-value core around x.
    double singularity_split_radius = 0.1;
    /// Points where w is not smooth (e.g. the ends of its support).
    std::vector<double> breakpoints;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

using Function1D = std::function<double(double)>;

/// C_{1,s} P.V. int (w(x) - w(y)) / |x - y|^{1+2s} dy for w defined on all of R.
/// The core |y - x| < r is folded into the even second difference and
/// integrated after t = r u^{1/(1-s)}, which removes the kernel singularity;
/// the remainder |y - x| >= r is integrated after t = r v^{-1/(2s)}.
QuadratureResult quadrature_apply(const Function1D& w, double x, double s,
                                  const QuadratureSpec& spec = {});

/// -C_{1,s} int_{x_l}^{x_r} w(y) / |p - y|^{1+2s} dy for p outside [x_l, x_r].
QuadratureResult normal_derivative_quadrature(const Function1D& w, double x_l, double x_r,
                                              double p, double s,
                                              const QuadratureSpec& spec = {});

/// C_{1,s} computed in 50-digit arithmetic.
double normalization_constant_reference(double s);

/// (-Delta)^s (1 - x^2)_+^s = 2^{2s} Gamma(s + 1/2) Gamma(s + 1) / Gamma(1/2) on (-1, 1).
double power_profile_constant(double s);

/// Explicit matrices of the reduced problem in coefficient space, unknowns
/// ordered slot-major over slots 1..M: index (m-1) n + i.
struct DenseReducedSystem {
    Eigen::MatrixXd S;  ///< control -> q(v,0) - q(0,0), nM x nM
    Eigen::MatrixXd R;  ///< backward source -> xi(0), n x nM
    Eigen::MatrixXd H;  ///< Hessian of J^gamma in coefficients
    Eigen::VectorXd b;  ///< -gradient of J^gamma at v = 0
};

constexpr int kDenseSizeCap = 2000;

/// Built from powers of (I + dt A)^{-1}, not from the time stepper. Throws
/// DomainError when n M exceeds kDenseSizeCap.
DenseReducedSystem dense_reduced_hessian(const RegretProblem& p);

/// Minimizer of J^gamma from a Cholesky factorization of H.
SpaceTimeField dense_solve(const RegretProblem& p, const DenseReducedSystem& sys);

Eigen::VectorXd flatten_controls(const SpaceTimeField& v);
SpaceTimeField unflatten_controls(const Eigen::VectorXd& x, const SpatialGrid& grid,
                                  const TimeGrid& tgrid);

/// Central differences of eval_J_reduced, divided by h dt so the result is
/// the Q-gradient and compares directly with reduced_gradient.
SpaceTimeField fd_gradient(const RegretProblem& p, const SpaceTimeField& v, double eps);

/// 64-bit FNV-1a, used to tag fixtures with the config that produced them.
std::string config_hash(const std::string& canonical);

}  // namespace lowregret::oracle
