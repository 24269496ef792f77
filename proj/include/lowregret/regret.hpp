#pragma once

#include "lowregret/evolution.hpp"

#include <memory>
#include <vector>

namespace lowregret {

/// Problem data for the low-regret control of
///   d_t q + (-Delta)^s q = f + v in Q,  q = 0 outside Omega,  q(0) = g,
/// with cost J(v, g) = ||q(v,g) - z_d||_Q^2 + aleph ||v||_Q^2.
struct RegretConfig {
    double s = 0.5;
    double aleph = 1.0;
    double gamma = 1.0;
    SpatialGrid grid;
    TimeGrid tgrid;
    SpaceTimeField f;
    SpaceTimeField z_d;
    double cg_tol = 1e-11;
    int cg_max_iters = 5000;

    /// Throws DomainError naming the offending field.
    void validate() const;
};

/// A validated config together with the operator, the factorized time
/// stepper, the uncontrolled state q(0,0) and J_gamma(0,0). Copies share
/// the operator and stepper.
class RegretProblem {
public:
    explicit RegretProblem(RegretConfig cfg);

    const RegretConfig& config() const { return cfg_; }
    const SpatialGrid& grid() const { return cfg_.grid; }
    const TimeGrid& tgrid() const { return cfg_.tgrid; }
    const FracOperator& op() const { return solver_->op(); }
    const EvolutionSolver& solver() const { return *solver_; }
    std::shared_ptr<const FracOperator> op_ptr() const { return op_; }

    double gamma() const { return cfg_.gamma; }
    double aleph() const { return cfg_.aleph; }

    /// q(0,0)
    const SpaceTimeField& q00() const { return q00_; }
    /// J_gamma(0,0) = ||q(0,0) - z_d||_Q^2
    double j_gamma_00() const { return j00_; }

    /// Same problem at a different relaxation weight; reuses all cached data.
    RegretProblem with_gamma(double gamma) const;

    /// q(v, g)
    SpaceTimeField state(const SpaceTimeField& v, const SpatialField& g) const;
    /// q(v, 0) - q(0, 0): the control-to-state map with zero data.
    SpaceTimeField state_increment(const SpaceTimeField& v) const;

    double inner_Q(const SpaceTimeField& a, const SpaceTimeField& b) const {
        return inner_product_Q(a, b, cfg_.grid, cfg_.tgrid);
    }
    double inner_omega(const SpatialField& a, const SpatialField& b) const {
        return inner_product_omega(a, b, cfg_.grid);
    }
    double norm_Q(const SpaceTimeField& a) const { return lowregret::norm_Q(a, grid(), tgrid()); }
    double norm_omega(const SpatialField& a) const {
        return lowregret::norm_omega(a, grid());
    }

private:
    RegretConfig cfg_;
    std::shared_ptr<const FracOperator> op_;
    std::shared_ptr<const EvolutionSolver> solver_;
    SpaceTimeField q00_;
    double j00_ = 0.0;
};

/// Solution of -d_t xi + (-Delta)^s xi = q(v,0) - q(0,0), xi(T) = 0.
struct XiSolution {
    SpaceTimeField trajectory;
    SpatialField initial_value;  ///< xi(0; v), slice 0 of trajectory
};

/// Residual of an exact discrete identity together with the magnitude of the
/// terms it balances, so callers can test value <= tol * scale.
struct IdentityResidual {
    double value = 0.0;
    double scale = 0.0;
    double relative() const { return scale > 0.0 ? value / scale : value; }
};

double eval_J(const RegretProblem& p, const SpaceTimeField& v, const SpatialField& g);
/// eval_J(v, g) - gamma ||g||_Omega^2
double eval_J_gamma(const RegretProblem& p, const SpaceTimeField& v, const SpatialField& g);

XiSolution solve_xi(const RegretProblem& p, const SpaceTimeField& v);

/// J^gamma(v) = J_gamma(v,0) - J_gamma(0,0) + ||xi(0;v)||_Omega^2 / gamma
double eval_J_reduced(const RegretProblem& p, const SpaceTimeField& v);

/// ||q(v,g) - q(v,0) - q(0,g) + q(0,0)||_Q
IdentityResidual superposition_residual(const RegretProblem& p, const SpaceTimeField& v,
                                        const SpatialField& g);

/// | [J_gamma(v,g) - J_gamma(0,g)]
///   - [J_gamma(v,0) - J_gamma(0,0) + 2 <q(0,g) - q(0,0), q(v,0) - q(0,0)>_Q] |
IdentityResidual decomposition_residual(const RegretProblem& p, const SpaceTimeField& v,
                                 const SpatialField& g);

/// | <g, xi(0;v)>_Omega - <q(v,0) - q(0,0), q(0,g) - q(0,0)>_Q |
IdentityResidual duality_residual(const RegretProblem& p, const SpaceTimeField& v,
                                  const SpatialField& g);

struct FenchelGap {
    /// ||xi0||^2 / gamma - max_probes (2 <g, xi0> - gamma ||g||^2); never negative
    /// beyond round-off.
    double gap = 0.0;
    /// probe objective at g* = xi0 / gamma minus ||xi0||^2 / gamma
    double maximizer_residual = 0.0;
    /// ||xi0||^2 / gamma
    double conjugate_value = 0.0;
    std::size_t best_probe = 0;
};

FenchelGap fenchel_gap(const RegretProblem& p, const SpaceTimeField& v,
                       const std::vector<SpatialField>& probes);

}  // namespace lowregret
