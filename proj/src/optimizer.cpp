#include "lowregret/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lowregret {

namespace {

struct Cascade {
    SpaceTimeField q;
    XiSolution xi;
    SpaceTimeField psi;
    SpaceTimeField phi;
};

// Adjoint cascade for the reduced functional at v.
Cascade adjoint_cascade(const RegretProblem& p, const SpaceTimeField& v) {
    const auto& solver = p.solver();
    const double root_gamma = std::sqrt(p.gamma());
    Cascade c;
    c.q = p.state(v, zero_spatial(p.grid()));
    c.xi.trajectory = solver.backward(c.q - p.q00(), zero_spatial(p.grid()));
    c.xi.initial_value = c.xi.trajectory.row(0).transpose();
    c.psi = solver.forward_free(-c.xi.initial_value / root_gamma);
    c.phi = solver.backward((c.q - p.config().z_d) - c.psi / root_gamma,
                            zero_spatial(p.grid()));
    return c;
}

SpaceTimeField without_initial_slot(SpaceTimeField v) {
    v.row(0).setZero();
    return v;
}

OptimalityBundle assemble_bundle(const RegretProblem& p, const SpaceTimeField& u) {
    Cascade c = adjoint_cascade(p, u);
    OptimalityBundle b;
    b.u = u;
    b.stationarity_residual = p.norm_Q(p.aleph() * u + to_control_slots(c.phi));
    b.q = std::move(c.q);
    b.xi = std::move(c.xi);
    b.psi = std::move(c.psi);
    b.phi = std::move(c.phi);
    b.objective = eval_J_reduced(p, u);
    return b;
}

}  // namespace

SpaceTimeField reduced_gradient(const RegretProblem& p, const SpaceTimeField& v) {
    check_dims(v, p.grid(), p.tgrid(), "reduced_gradient");
    const Cascade c = adjoint_cascade(p, v);
    return without_initial_slot(2.0 * (p.aleph() * v + to_control_slots(c.phi)));
}

SpaceTimeField normal_operator(const RegretProblem& p, const SpaceTimeField& v) {
    const auto& solver = p.solver();
    const SpatialField zero = zero_spatial(p.grid());
    const SpaceTimeField dq = p.state_increment(v);
    const SpatialField xi0 = solver.backward(dq, zero).row(0).transpose();
    const SpaceTimeField lifted = solver.forward_free(xi0 / p.gamma());
    const SpaceTimeField adjoint = solver.backward(dq + lifted, zero);
    return without_initial_slot(p.aleph() * v + to_control_slots(adjoint));
}

SpaceTimeField normal_rhs(const RegretProblem& p) {
    const SpaceTimeField miss = p.q00() - p.config().z_d;
    return -to_control_slots(p.solver().backward(miss, zero_spatial(p.grid())));
}

OptimalityBundle solve_low_regret(const RegretProblem& p, const SolveOptions& options) {
    const auto& cfg = p.config();
    SpaceTimeField u = zero_spacetime(p.grid(), p.tgrid());
    if (options.initial_guess) {
        check_dims(*options.initial_guess, p.grid(), p.tgrid(), "initial guess");
        u = without_initial_slot(*options.initial_guess);
    }

    const SpaceTimeField rhs = normal_rhs(p);
    const double scale = p.norm_Q(rhs);
    std::vector<double> history;
    int iterations = 0;
    bool converged = false;

    if (scale == 0.0) {
        // Tracking is already optimal without control.
        u.setZero();
        converged = true;
        history.push_back(0.0);
    } else {
        const double target = cfg.cg_tol * scale;
        const auto objective = [&](const SpaceTimeField& r) {
            return -p.inner_Q(u, rhs + r);
        };
        for (int restart = 0; restart <= options.max_restarts && !converged; ++restart) {
            SpaceTimeField r = rhs - normal_operator(p, u);
            double rr = p.inner_Q(r, r);
            history.push_back(objective(r));
            if (std::sqrt(rr) <= target) {
                converged = true;
                break;
            }
            SpaceTimeField d = r;
            while (iterations < cfg.cg_max_iters) {
                const SpaceTimeField nd = normal_operator(p, d);
                const double curvature = p.inner_Q(d, nd);
                if (!(curvature > 0.0)) break;
                const double alpha = rr / curvature;
                u += alpha * d;
                r -= alpha * nd;
                ++iterations;
                const double rr_next = p.inner_Q(r, r);
                history.push_back(objective(r));
                if (std::sqrt(rr_next) <= target) break;
                d = r + (rr_next / rr) * d;
                rr = rr_next;
            }
            const SpaceTimeField true_r = rhs - normal_operator(p, u);
            converged = p.norm_Q(true_r) <= target;
            if (iterations >= cfg.cg_max_iters) break;
        }
    }

    OptimalityBundle b = assemble_bundle(p, u);
    b.residual_scale = scale;
    b.cg_iterations = iterations;
    b.converged = converged;
    b.objective_history = std::move(history);
    return b;
}

std::map<std::string, double> OptimalityResiduals::as_map() const {
    return {{"state", state},   {"xi", xi},
            {"psi", psi},       {"phi", phi},
            {"stationarity", stationarity}};
}

double OptimalityResiduals::max() const {
    return std::max({state, xi, psi, phi, stationarity});
}

OptimalityResiduals optimality_residuals(const RegretProblem& p, const OptimalityBundle& b) {
    const auto& cfg = p.config();
    const auto& op = p.op();
    const auto& tg = p.tgrid();
    check_dims(b.u, p.grid(), tg, "bundle u");
    check_dims(b.q, p.grid(), tg, "bundle q");
    check_dims(b.xi.trajectory, p.grid(), tg, "bundle xi");
    check_dims(b.psi, p.grid(), tg, "bundle psi");
    check_dims(b.phi, p.grid(), tg, "bundle phi");

    const double root_gamma = std::sqrt(p.gamma());
    const int M = tg.M;
    const auto slice = [](const SpaceTimeField& a, int m) -> SpatialField {
        return a.row(m).transpose();
    };

    OptimalityResiduals r;
    r.state = forward_equation_residual(op, tg, b.q, cfg.f + b.u) +
              p.norm_omega(slice(b.q, 0));
    r.xi = backward_equation_residual(op, tg, b.xi.trajectory, b.q - p.q00()) +
           p.norm_omega(slice(b.xi.trajectory, M)) +
           p.norm_omega(b.xi.initial_value - slice(b.xi.trajectory, 0));
    r.psi = forward_equation_residual(op, tg, b.psi, zero_spacetime(p.grid(), tg)) +
            p.norm_omega(slice(b.psi, 0) + slice(b.xi.trajectory, 0) / root_gamma);
    r.phi = backward_equation_residual(op, tg, b.phi,
                                       (b.q - cfg.z_d) - b.psi / root_gamma) +
            p.norm_omega(slice(b.phi, M));
    r.stationarity = p.norm_Q(p.aleph() * b.u + to_control_slots(b.phi));
    r.scale = std::max({p.norm_Q(cfg.f), p.norm_Q(cfg.z_d), p.norm_Q(p.q00()),
                        p.norm_Q(b.u), p.norm_Q(b.q)});
    return r;
}

GammaSweepReport gamma_sweep(const RegretProblem& base, const std::vector<double>& gammas) {
    if (gammas.size() < 3) throw DomainError("gamma_sweep: need at least 3 gammas");
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        if (!std::isfinite(gammas[k]) || !(gammas[k] > 0.0)) {
            throw DomainError("gamma_sweep: gammas must be positive");
        }
        if (k > 0 && !(gammas[k] < gammas[k - 1])) {
            throw DomainError("gamma_sweep: gammas must be strictly decreasing");
        }
    }
    if (std::log10(gammas.front() / gammas.back()) < 3.0 - 1e-12) {
        throw DomainError("gamma_sweep: gammas must span at least 3 decades");
    }

    GammaSweepReport report;
    report.gammas = gammas;
    std::optional<SpaceTimeField> warm;
    for (const double gamma : gammas) {
        const RegretProblem p = base.with_gamma(gamma);
        SolveOptions options;
        options.initial_guess = warm;
        OptimalityBundle b = solve_low_regret(p, options);

        const double xi0_norm = p.norm_omega(b.xi.initial_value);
        report.xi0_norms.push_back(xi0_norm);
        report.scaled_xi0_norms.push_back(xi0_norm / std::sqrt(gamma));
        report.converged.push_back(b.converged);
        report.cg_iterations.push_back(b.cg_iterations);
        report.objectives.push_back(b.objective);
        report.control_norms.push_back(p.norm_Q(b.u));
        report.state_norms.push_back(p.norm_Q(b.q));
        report.stationarity_residuals.push_back(b.stationarity_residual);
        report.xi0.push_back(b.xi.initial_value);
        if (!report.controls.empty()) {
            report.pairwise_control_distances.push_back(p.norm_Q(b.u - report.controls.back()));
        }
        warm = b.u;
        report.controls.push_back(std::move(b.u));
    }

    const bool any_zero = std::any_of(report.xi0_norms.begin(), report.xi0_norms.end(),
                                      [](double x) { return !(x > 0.0); });
    if (any_zero) {
        report.degenerate = true;
        report.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    } else {
        const auto n = static_cast<double>(gammas.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < gammas.size(); ++k) {
            const double x = std::log(gammas[k]);
            const double y = std::log(report.xi0_norms[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        report.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return report;
}

GammaSweepReport gamma_sweep(const RegretConfig& cfg, const std::vector<double>& gammas) {
    return gamma_sweep(RegretProblem(cfg), gammas);
}

}  // namespace lowregret
