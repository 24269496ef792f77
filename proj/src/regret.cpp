#include "lowregret/regret.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lowregret {

namespace {

void require_positive(double value, const char* field) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        std::ostringstream msg;
        msg << "config field '" << field << "' must be positive, got " << value;
        throw DomainError(msg.str());
    }
}

}  // namespace

void RegretConfig::validate() const {
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream msg;
        msg << "config field 's' must lie in (0, 1), got " << s;
        throw DomainError(msg.str());
    }
    require_positive(aleph, "aleph");
    require_positive(gamma, "gamma");
    require_positive(cg_tol, "cg_tol");
    if (cg_max_iters < 1) throw DomainError("config field 'cg_max_iters' must be >= 1");
    if (grid.n < 1 || !(grid.h > 0.0)) throw DomainError("config field 'grid' is not built");
    if (tgrid.M < 1 || !(tgrid.dt > 0.0)) throw DomainError("config field 'tgrid' is not built");
    check_dims(f, grid, tgrid, "config field 'f'");
    check_dims(z_d, grid, tgrid, "config field 'z_d'");
}

RegretProblem::RegretProblem(RegretConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    op_ = std::make_shared<const FracOperator>(assemble_operator(cfg_.grid, cfg_.s));
    solver_ = std::make_shared<const EvolutionSolver>(op_, cfg_.tgrid);
    q00_ = solver_->forward(cfg_.f, zero_spatial(cfg_.grid));
    const SpaceTimeField miss = q00_ - cfg_.z_d;
    j00_ = inner_Q(miss, miss);
}

RegretProblem RegretProblem::with_gamma(double gamma) const {
    require_positive(gamma, "gamma");
    RegretProblem copy(*this);
    copy.cfg_.gamma = gamma;
    return copy;
}

SpaceTimeField RegretProblem::state(const SpaceTimeField& v, const SpatialField& g) const {
    check_dims(v, grid(), tgrid(), "control");
    return solver_->forward(cfg_.f + v, g);
}

SpaceTimeField RegretProblem::state_increment(const SpaceTimeField& v) const {
    check_dims(v, grid(), tgrid(), "control");
    return solver_->forward(v, zero_spatial(grid()));
}

double eval_J(const RegretProblem& p, const SpaceTimeField& v, const SpatialField& g) {
    const SpaceTimeField miss = p.state(v, g) - p.config().z_d;
    return p.inner_Q(miss, miss) + p.aleph() * p.inner_Q(v, v);
}

double eval_J_gamma(const RegretProblem& p, const SpaceTimeField& v, const SpatialField& g) {
    return eval_J(p, v, g) - p.gamma() * p.inner_omega(g, g);
}

XiSolution solve_xi(const RegretProblem& p, const SpaceTimeField& v) {
    // q(v,0) - q(0,0) computed directly from the zero-data map, which equals
    // the difference of the two states by linearity.
    const SpaceTimeField source = p.state_increment(v);
    XiSolution xi;
    xi.trajectory = p.solver().backward(source, zero_spatial(p.grid()));
    xi.initial_value = xi.trajectory.row(0).transpose();
    return xi;
}

double eval_J_reduced(const RegretProblem& p, const SpaceTimeField& v) {
    const SpatialField g0 = zero_spatial(p.grid());
    const double j_v0 = eval_J_gamma(p, v, g0);
    const XiSolution xi = solve_xi(p, v);
    return j_v0 - p.j_gamma_00() + p.inner_omega(xi.initial_value, xi.initial_value) / p.gamma();
}

IdentityResidual superposition_residual(const RegretProblem& p, const SpaceTimeField& v,
                                        const SpatialField& g) {
    const SpatialField g0 = zero_spatial(p.grid());
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    const SpaceTimeField q_vg = p.state(v, g);
    const SpaceTimeField q_v0 = p.state(v, g0);
    const SpaceTimeField q_0g = p.state(v0, g);
    const SpaceTimeField q_00 = p.state(v0, g0);
    IdentityResidual r;
    r.value = p.norm_Q(q_vg - q_v0 - q_0g + q_00);
    r.scale = p.norm_Q(q_vg) + p.norm_Q(q_v0) + p.norm_Q(q_0g) + p.norm_Q(q_00);
    return r;
}

IdentityResidual decomposition_residual(const RegretProblem& p, const SpaceTimeField& v,
                                 const SpatialField& g) {
    const SpatialField g0 = zero_spatial(p.grid());
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());

    const double j_vg = eval_J_gamma(p, v, g);
    const double j_0g = eval_J_gamma(p, v0, g);
    const double j_v0 = eval_J_gamma(p, v, g0);
    const double j_00 = eval_J_gamma(p, v0, g0);
    const double cross =
        2.0 * p.inner_Q(p.state(v0, g) - p.q00(), p.state(v, g0) - p.q00());

    // The -gamma ||g||^2 of J_gamma(v,g) and J_gamma(0,g) cancel on the left,
    // so the right-hand side carries no net gamma term.
    const double lhs = j_vg - j_0g;
    const double rhs = j_v0 - j_00 + cross;

    IdentityResidual r;
    r.value = std::abs(lhs - rhs);
    r.scale = std::abs(j_vg) + std::abs(j_0g) + std::abs(j_v0) + std::abs(j_00) +
              std::abs(cross);
    return r;
}

IdentityResidual duality_residual(const RegretProblem& p, const SpaceTimeField& v,
                                  const SpatialField& g) {
    const XiSolution xi = solve_xi(p, v);
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    const SpaceTimeField dq_v = p.state(v, zero_spatial(p.grid())) - p.q00();
    const SpaceTimeField dq_g = p.state(v0, g) - p.q00();

    const double lhs = p.inner_omega(g, xi.initial_value);
    const double rhs = p.inner_Q(dq_v, dq_g);
    IdentityResidual r;
    r.value = std::abs(lhs - rhs);
    r.scale = p.norm_omega(g) * p.norm_omega(xi.initial_value) + p.norm_Q(dq_v) * p.norm_Q(dq_g);
    return r;
}

FenchelGap fenchel_gap(const RegretProblem& p, const SpaceTimeField& v,
                       const std::vector<SpatialField>& probes) {
    if (probes.empty()) throw DomainError("fenchel_gap: need at least one probe");
    const SpatialField xi0 = solve_xi(p, v).initial_value;
    const double gamma = p.gamma();
    const auto objective = [&](const SpatialField& g) {
        return 2.0 * p.inner_omega(g, xi0) - gamma * p.inner_omega(g, g);
    };

    FenchelGap out;
    out.conjugate_value = p.inner_omega(xi0, xi0) / gamma;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const double value = objective(probes[k]);
        if (value > best) {
            best = value;
            out.best_probe = k;
        }
    }
    out.gap = out.conjugate_value - best;
    out.maximizer_residual = objective(xi0 / gamma) - out.conjugate_value;
    return out;
}

}  // namespace lowregret
