// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance <lowregret-cli> <runs-dir>

#include "lowregret/fractional_operator.hpp"
#include "lowregret/optimizer.hpp"
#include "lowregret/oracle.hpp"
#include "lowregret/scenario.hpp"
#include "support/fixture_io.hpp"
#include "support/problems.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace lowregret;
using lowregret::testing::make_config;
using lowregret::testing::relative_Q;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::string fixture(const std::string& name) {
    return std::string(LOWREGRET_FIXTURE_DIR) + "/" + name + ".csv";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double interior_profile_error(int n, double reference) {
    const SpatialGrid g = build_grid(-1.0, 1.0, n);
    SpatialField w(n);
    for (int i = 0; i < n; ++i) w(i) = std::sqrt(1.0 - g.nodes[i] * g.nodes[i]);
    const SpatialField aw = assemble_operator(g, 0.5).apply(w);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(g.nodes[i]) <= 0.8 + 1e-12) {
            worst = std::max(worst, std::abs(aw(i) - reference) / reference);
        }
    }
    return worst;
}

Outcome power_profile() {
    const auto rows = fixtures::select(fixtures::load(fixture("power_profile")), "power_profile",
                                       0.5, fixtures::profile_spec());
    double reference = 0.0;
    for (const auto& r : rows) reference += r.value / static_cast<double>(rows.size());
    const double e99 = interior_profile_error(99, reference);
    const double e199 = interior_profile_error(199, reference);
    const double e399 = interior_profile_error(399, reference);
    return {!rows.empty() && e399 <= 0.02 && e199 < e99 && e399 < e199,
            "errors " + fmt(e99) + " " + fmt(e199) + " " + fmt(e399)};
}

Outcome normalization() {
    const auto rows = fixtures::load(fixture("normalization"));
    double worst = 0.0;
    bool found = true;
    for (const double s : {0.25, 0.5, 0.75}) {
        const auto sel = fixtures::select(rows, "normalization", s, fixtures::profile_spec());
        found = found && sel.size() == 1;
        if (sel.empty()) continue;
        const double c = normalization_constant(s);
        worst = std::max(worst, std::abs(c - sel[0].value) / sel[0].value);
        worst = std::max(worst, std::abs(c - oracle::normalization_constant_reference(s)) / c);
    }
    return {found && worst <= 1e-12, "max relative " + fmt(worst)};
}

Outcome adjoint() {
    const RegretProblem p(make_config(50, 40, 1.0, 1.0));
    const EvolutionSolver& solver = p.solver();
    UniformSource rng(101);
    const SpatialField zero = zero_spatial(p.grid());
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const SpaceTimeField w = rng.controls(p.grid(), p.tgrid());
        const SpaceTimeField r = rng.controls(p.grid(), p.tgrid());
        const SpaceTimeField sw = solver.forward(w, zero);
        const SpaceTimeField str = to_control_slots(solver.backward(r, zero));
        const double gap = std::abs(p.inner_Q(sw, r) - p.inner_Q(w, str));
        worst = std::max(worst, gap / (p.norm_Q(sw) * p.norm_Q(r)));
    }
    return {worst <= 1e-12, "max relative " + fmt(worst)};
}

Outcome identity(const std::function<IdentityResidual(const RegretProblem&, const SpaceTimeField&,
                                                      const SpatialField&)>& f,
                 std::uint64_t seed) {
    const RegretProblem p(make_config(40, 30, 1.0, 0.1));
    UniformSource rng(seed);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
        const SpatialField g = rng.spatial(p.grid());
        worst = std::max(worst, f(p, v, g).relative());
    }
    return {worst <= 1e-11, "max relative " + fmt(worst)};
}

Outcome fenchel() {
    const RegretProblem p(make_config(40, 30, 1.0, 0.1));
    UniformSource rng(104);
    const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
    std::vector<SpatialField> probes;
    for (int k = 0; k < 100; ++k) probes.push_back(rng.spatial(p.grid()));
    const FenchelGap random = fenchel_gap(p, v, probes);
    const SpatialField xi0 = solve_xi(p, v).initial_value;
    const FenchelGap at_max = fenchel_gap(p, v, {xi0 / p.gamma()});
    const double gap = random.gap / random.conjugate_value;
    const double maximizer = std::abs(at_max.maximizer_residual) / at_max.conjugate_value;
    return {gap >= -1e-12 && maximizer <= 1e-12,
            "min gap " + fmt(gap) + ", maximizer " + fmt(maximizer)};
}

Outcome gradient() {
    const RegretProblem p(make_config(30, 25, 0.5, 0.05));
    UniformSource rng(105);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
        worst = std::max(worst,
                         relative_Q(p, oracle::fd_gradient(p, v, 1e-5), reduced_gradient(p, v)));
    }
    return {worst <= 1e-6, "max relative " + fmt(worst)};
}

Outcome dense_match() {
    double worst = 0.0;
    bool converged = true;
    for (const auto& [aleph, gamma] : {std::pair{1.0, 1.0}, std::pair{0.1, 0.01}}) {
        const RegretProblem p(make_config(20, 20, aleph, gamma));
        const OptimalityBundle b = solve_low_regret(p);
        converged = converged && b.converged;
        const SpaceTimeField dense = oracle::dense_solve(p, oracle::dense_reduced_hessian(p));
        worst = std::max(worst, relative_Q(p, b.u, dense));
    }
    return {converged && worst <= 1e-8, "max relative " + fmt(worst)};
}

RunReport run_config(const std::string& name, const fs::path& runs) {
    RunOptions options;
    options.out_dir = runs / name;
    return run_scenario(fs::path(LOWREGRET_CONFIG_DIR) / (name + ".json"), options);
}

Outcome residuals(const RunReport& solve) {
    const double worst = solve.metrics.at("max_residual").get<double>();
    const double scale = solve.metrics.at("residual_scale").get<double>();
    const bool converged = solve.metrics.at("converged").get<bool>();
    return {converged && worst <= 1e-8 * scale,
            "max " + fmt(worst) + " against scale " + fmt(scale)};
}

Outcome scaling(const RunReport& sweep) {
    const auto& m = sweep.metrics;
    if (m.at("fitted_slope").is_null()) return {false, "degenerate sweep"};
    const double slope = m.at("fitted_slope").get<double>();
    const double ratio = m.at("control_norm_ratio").get<double>();
    return {slope >= 0.45 && ratio <= 10.0, "slope " + fmt(slope) + ", norm ratio " + fmt(ratio)};
}

Outcome convergence(const RunReport& sweep) {
    const auto& m = sweep.metrics;
    const bool decreasing = m.at("distances_decreasing").get<bool>();
    const double membership = m.at("membership_max").get<double>();
    const std::size_t probes = m.at("membership_probes").get<std::size_t>();
    return {decreasing && probes >= 20 && membership <= 1e-4,
            std::string(decreasing ? "distances decreasing" : "distances not decreasing") +
                ", membership " + fmt(membership) + " over " + std::to_string(probes) +
                " probes"};
}

Outcome no_regret(const RunReport& solve, const RunReport& sweep) {
    bool ok = sweep.metrics.at("objectives_nonpositive").get<bool>();
    const double j = solve.metrics.at("objective").get<double>();
    ok = ok && j <= 0.0;
    const RegretProblem p(make_config(40, 30, 0.1, 0.01));
    const double j0 = eval_J_reduced(p, zero_spacetime(p.grid(), p.tgrid()));
    ok = ok && std::abs(j0) <= 1e-15 * p.j_gamma_00();
    return {ok, "J(u) " + fmt(j) + ", J(0) " + fmt(j0)};
}

Outcome reproducible(const std::string& cli, const fs::path& runs) {
    const fs::path cfg = fs::path(LOWREGRET_CONFIG_DIR) / "solve.json";
    const fs::path a = runs / "repeat_a";
    const fs::path b = runs / "repeat_b";
    fs::remove_all(a);
    fs::remove_all(b);
    for (const fs::path& out : {a, b}) {
        const std::string cmd = cli + " run " + cfg.string() + " --seed 42 --quiet --out " +
                                out.string();
        if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    }
    const std::string ra = slurp(a / "report.json");
    const std::string rb = slurp(b / "report.json");
    bool same = !ra.empty() && ra == rb;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        same = same && slurp(entry.path()) == slurp(b / entry.path().filename());
    }
    return {same, std::to_string(ra.size()) + " report bytes and " + std::to_string(files) +
                      " csv files compared"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <lowregret-cli> <runs-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path runs = argv[2];
    fs::create_directories(runs);

    RunReport solve;
    RunReport sweep;
    std::string run_error;
    try {
        solve = run_config("solve", runs);
        sweep = run_config("sweep", runs);
    } catch (const std::exception& e) {
        run_error = e.what();
    }
    const auto needs_runs = [&](const std::function<Outcome()>& f) {
        return [&run_error, f]() -> Outcome {
            if (!run_error.empty()) return {false, "scenario run failed: " + run_error};
            return f();
        };
    };

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"fractional Laplacian of the power profile", power_profile},
        {"normalization constant", normalization},
        {"forward/backward adjointness", adjoint},
        {"regret decomposition", [] { return identity(decomposition_residual, 102); }},
        {"initial-data duality", [] { return identity(duality_residual, 103); }},
        {"Legendre-Fenchel reduction", fenchel},
        {"adjoint gradient vs finite differences", gradient},
        {"CG vs dense reduced Hessian", dense_match},
        {"optimality system residuals", needs_runs([&] { return residuals(solve); })},
        {"square-root scaling of xi(0)", needs_runs([&] { return scaling(sweep); })},
        {"convergence to the no-regret control", needs_runs([&] { return convergence(sweep); })},
        {"low-regret objective is non-positive", needs_runs([&] { return no_regret(solve, sweep); })},
        {"reproducible reports", [&] { return reproducible(cli, runs); }},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (k + 1) << ": "
                  << criteria[k].first << " (" << o.detail << ")\n";
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
