#pragma once

#include "lowregret/regret.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lowregret {

/// The low-regret control u^gamma and the states of its optimality system:
///
///   q   forward,  source f + u,                              q(0) = 0
///   xi  backward, source q - q(0,0),                         xi(T) = 0
///   psi forward,  no source,                                 psi(0) = -xi(0)/sqrt(gamma)
///   phi backward, source (q - z_d) - psi/sqrt(gamma),         phi(T) = 0
///
/// and aleph u + phi = 0, where phi is read in control slots (slot m holds
/// backward slice m-1, see to_control_slots).
struct OptimalityBundle {
    SpaceTimeField u;
    SpaceTimeField q;
    XiSolution xi;
    SpaceTimeField psi;
    SpaceTimeField phi;
    double stationarity_residual = 0.0;  ///< ||aleph u + phi||_Q
    double residual_scale = 0.0;         ///< ||S^*(q(0,0) - z_d)||_Q, the CG right-hand side
    int cg_iterations = 0;
    bool converged = false;
    double objective = 0.0;              ///< J^gamma(u)
    std::vector<double> objective_history;  ///< J^gamma at every CG iterate, starting guess first
};

/// Q-gradient of J^gamma: 2 (aleph v + phi(v)) built by the adjoint cascade.
SpaceTimeField reduced_gradient(const RegretProblem& p, const SpaceTimeField& v);

/// v -> (S^*S + aleph I + (1/gamma) (RS)^*(RS)) v, all actions by time stepping.
/// S is the control-to-state map and R maps a backward source to xi(0).
SpaceTimeField normal_operator(const RegretProblem& p, const SpaceTimeField& v);

/// -S^*(q(0,0) - z_d)
SpaceTimeField normal_rhs(const RegretProblem& p);

struct SolveOptions {
    std::optional<SpaceTimeField> initial_guess;
    /// Restarts from the current iterate when the recomputed residual exceeds
    /// the tolerance the recursive residual claimed.
    int max_restarts = 3;
};

/// Conjugate gradients on the normal equations in the Q inner product. On
/// non-convergence the bundle is still filled and converged = false.
OptimalityBundle solve_low_regret(const RegretProblem& p, const SolveOptions& options = {});

struct OptimalityResiduals {
    double state = 0.0;
    double xi = 0.0;
    double psi = 0.0;
    double phi = 0.0;
    double stationarity = 0.0;
    /// Largest norm among f, z_d, q(0,0), u and q in the bundle.
    double scale = 0.0;

    std::map<std::string, double> as_map() const;
    double max() const;
};

/// Re-substitutes every field of the bundle into its discrete equation,
/// initial/terminal condition and the stationarity relation.
OptimalityResiduals optimality_residuals(const RegretProblem& p, const OptimalityBundle& b);

struct GammaSweepReport {
    std::vector<double> gammas;
    std::vector<SpaceTimeField> controls;
    std::vector<double> xi0_norms;
    /// ||u^{gamma_k} - u^{gamma_{k+1}}||_Q, one fewer entry than gammas
    std::vector<double> pairwise_control_distances;
    /// least-squares slope of log ||xi^gamma(0)|| against log gamma; NaN when degenerate
    double fitted_slope = 0.0;
    bool degenerate = false;

    std::vector<bool> converged;
    std::vector<int> cg_iterations;
    std::vector<double> objectives;
    std::vector<double> control_norms;
    std::vector<double> state_norms;
    /// ||xi^gamma(0)|| / sqrt(gamma) = ||psi^gamma(0)||
    std::vector<double> scaled_xi0_norms;
    std::vector<double> stationarity_residuals;
    std::vector<SpatialField> xi0;
};

/// Solves along a strictly decreasing gamma list (at least 3 entries spanning
/// at least 3 decades), warm-starting each solve from the previous control.
GammaSweepReport gamma_sweep(const RegretProblem& base, const std::vector<double>& gammas);
GammaSweepReport gamma_sweep(const RegretConfig& cfg, const std::vector<double>& gammas);

}  // namespace lowregret
