#include "lowregret/scenario.hpp"

#include "lowregret/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#ifndef LOWREGRET_VERSION
#define LOWREGRET_VERSION "0.0.0"
#endif

namespace lowregret {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Identity thresholds of the audit scenario.
constexpr double kIdentityTol = 1e-11;
constexpr double kAdjointTol = 1e-12;
constexpr double kGradientTol = 1e-6;
constexpr double kGradientEps = 1e-5;
constexpr int kGradientTrials = 2;
// No-regret membership surrogate: |<g, xi(0;u)>| <= tol ||g||.
constexpr double kMembershipTol = 1e-4;

const std::set<std::string> kTopLevelKeys{
    "scenario", "s",     "aleph",         "gamma",  "domain", "time", "source", "target",
    "probes",   "random_probes", "gammas", "cg",     "seed",   "audit", "output_dir"};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw DomainError("config field '" + field + "' " + what);
}

const json* member(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double read_number(const json& obj, const std::string& key, const std::string& field,
                   double fallback) {
    const json* v = member(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) field_error(field, "must be a number, got " + v->dump());
    const double x = v->get<double>();
    if (!std::isfinite(x)) field_error(field, "must be finite");
    return x;
}

long long read_integer(const json& obj, const std::string& key, const std::string& field,
                       long long fallback) {
    const json* v = member(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) field_error(field, "must be an integer, got " + v->dump());
    return v->get<long long>();
}

std::string read_string(const json& obj, const std::string& key, const std::string& field,
                        const std::string& fallback) {
    const json* v = member(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) field_error(field, "must be a string, got " + v->dump());
    return v->get<std::string>();
}

const json& read_object(const json& obj, const std::string& key,
                        const std::set<std::string>& allowed) {
    static const json empty = json::object();
    const json* v = member(obj, key);
    if (!v) return empty;
    if (!v->is_object()) field_error(key, "must be an object");
    for (const auto& [k, _] : v->items()) {
        if (!allowed.count(k)) field_error(key + "." + k, "is not a recognised field");
    }
    return *v;
}

Preset read_preset(const json& obj, const std::string& key, const std::string& fallback) {
    const std::string text = read_string(obj, key, key, fallback);
    try {
        return Preset::parse(text);
    } catch (const DomainError& e) {
        field_error(key, e.what());
    }
}

std::string format_label(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

json number_or_null(double value) {
    return std::isfinite(value) ? json(value) : json(nullptr);
}

CsvTable field_snapshot(const SpatialGrid& grid, const std::vector<std::string>& names,
                        const std::vector<SpatialField>& columns) {
    CsvTable t;
    t.header.push_back("x");
    t.header.insert(t.header.end(), names.begin(), names.end());
    for (int i = 0; i < grid.n; ++i) {
        std::vector<std::string> row{format_number(grid.nodes[i])};
        for (const auto& c : columns) row.push_back(format_number(c(i)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<SpatialField> probe_set(const ScenarioConfig& cfg, const SpatialGrid& grid,
                                    UniformSource& rng) {
    std::vector<SpatialField> probes;
    for (const auto& preset : cfg.probes) probes.push_back(preset.sample(grid));
    for (int k = 0; k < cfg.random_probes; ++k) probes.push_back(rng.spatial(grid));
    return probes;
}

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void run_solve(const ScenarioConfig& cfg, RunReport& report) {
    Stopwatch clock;
    const RegretProblem p(cfg.regret_config());
    report.timings["setup"] = clock.lap();
    const OptimalityBundle b = solve_low_regret(p);
    report.timings["solve"] = clock.lap();
    const OptimalityResiduals res = optimality_residuals(p, b);
    report.timings["residuals"] = clock.lap();

    const double zero_objective = eval_J_reduced(p, zero_spacetime(p.grid(), p.tgrid()));
    json residuals = json::object();
    for (const auto& [name, value] : res.as_map()) residuals[name] = value;

    report.metrics = {
        {"objective", b.objective},
        {"objective_at_zero", zero_objective},
        {"j_gamma_00", p.j_gamma_00()},
        {"converged", b.converged},
        {"cg_iterations", b.cg_iterations},
        {"control_norm", p.norm_Q(b.u)},
        {"state_norm", p.norm_Q(b.q)},
        {"xi0_norm", p.norm_omega(b.xi.initial_value)},
        {"residuals", residuals},
        {"residual_scale", res.scale},
        {"max_residual", res.max()},
    };
    report.success = b.converged;

    const int M = p.tgrid().M;
    const int mid = std::max(1, M / 2);
    report.tables["control"] = field_snapshot(
        p.grid(), {"u_t" + format_label(p.tgrid().times[1]),
                   "u_t" + format_label(p.tgrid().times[mid]),
                   "u_t" + format_label(p.tgrid().times[M])},
        {b.u.row(1).transpose(), b.u.row(mid).transpose(), b.u.row(M).transpose()});
    report.tables["xi0"] = field_snapshot(p.grid(), {"xi0", "psi0"},
                                          {b.xi.initial_value, b.psi.row(0).transpose()});

    CsvTable rt;
    rt.header = {"equation", "residual", "scale"};
    for (const auto& [name, value] : res.as_map()) {
        rt.rows.push_back({name, format_number(value), format_number(res.scale)});
    }
    report.tables["residuals"] = std::move(rt);

    CsvTable ht;
    ht.header = {"iteration", "objective"};
    for (std::size_t k = 0; k < b.objective_history.size(); ++k) {
        ht.rows.push_back({std::to_string(k), format_number(b.objective_history[k])});
    }
    report.tables["objective_history"] = std::move(ht);
}

struct AuditRow {
    std::string identity;
    double worst = 0.0;  // largest relative residual over the trials
    double tolerance = 0.0;
    int trials = 0;
};

void track(AuditRow& row, double relative) {
    row.worst = std::max(row.worst, relative);
    ++row.trials;
}

void run_audit(const ScenarioConfig& cfg, RunReport& report) {
    Stopwatch clock;
    const RegretProblem p(cfg.regret_config());
    const auto& grid = p.grid();
    const auto& tg = p.tgrid();
    const auto& solver = p.solver();
    UniformSource rng(cfg.seed);
    report.timings["setup"] = clock.lap();

    AuditRow superposition{"superposition", 0.0, kIdentityTol};
    AuditRow decomposition{"regret_decomposition", 0.0, kIdentityTol};
    AuditRow duality{"initial_data_duality", 0.0, kIdentityTol};
    AuditRow adjoint{"forward_backward_adjoint", 0.0, kAdjointTol};
    AuditRow initial_adjoint{"initial_value_adjoint", 0.0, kAdjointTol};
    AuditRow fenchel{"fenchel_gap", 0.0, kAdjointTol};
    AuditRow fenchel_max{"fenchel_maximizer", 0.0, kAdjointTol};

    const SpatialField zero = zero_spatial(grid);
    for (int trial = 0; trial < cfg.audit_trials; ++trial) {
        const SpaceTimeField v = rng.controls(grid, tg);
        const SpatialField g = rng.spatial(grid);
        const SpaceTimeField w = rng.controls(grid, tg);

        track(superposition, superposition_residual(p, v, g).relative());
        track(decomposition, decomposition_residual(p, v, g).relative());
        track(duality, duality_residual(p, v, g).relative());

        const SpaceTimeField sv = solver.forward(v, zero);
        const SpaceTimeField sw = to_control_slots(solver.backward(w, zero));
        const double lhs = p.inner_Q(sv, w);
        const double rhs = p.inner_Q(v, sw);
        track(adjoint, std::abs(lhs - rhs) / (p.norm_Q(sv) * p.norm_Q(w)));

        const SpaceTimeField free = solver.forward_free(g);
        const SpatialField back0 = solver.backward(w, zero).row(0).transpose();
        track(initial_adjoint, std::abs(p.inner_Q(free, w) - p.inner_omega(g, back0)) /
                                   (p.norm_Q(free) * p.norm_Q(w)));

        std::vector<SpatialField> probes = probe_set(cfg, grid, rng);
        if (probes.empty()) probes.push_back(g);
        const FenchelGap fg = fenchel_gap(p, v, probes);
        const double fscale = std::max(fg.conjugate_value, 1e-300);
        // A negative gap would mean a probe beats the conjugate value.
        track(fenchel, std::max(0.0, -fg.gap) / fscale);
        track(fenchel_max, std::abs(fg.maximizer_residual) / fscale);
    }
    report.timings["identities"] = clock.lap();

    AuditRow gradient{"adjoint_gradient", 0.0, kGradientTol};
    for (int trial = 0; trial < std::min(kGradientTrials, cfg.audit_trials); ++trial) {
        const SpaceTimeField v = rng.controls(grid, tg);
        const SpaceTimeField adj = reduced_gradient(p, v);
        const SpaceTimeField fd = oracle::fd_gradient(p, v, kGradientEps);
        track(gradient, p.norm_Q(adj - fd) / p.norm_Q(adj));
    }
    report.timings["gradient"] = clock.lap();

    const std::vector<AuditRow> rows{superposition, decomposition, duality,   adjoint,
                                     initial_adjoint, fenchel,     fenchel_max, gradient};
    CsvTable t;
    t.header = {"identity", "max_relative_residual", "tolerance", "trials", "pass"};
    json identities = json::object();
    bool all_pass = true;
    for (const auto& row : rows) {
        const bool pass = row.worst <= row.tolerance;
        all_pass = all_pass && pass;
        identities[row.identity] = {{"max_relative_residual", row.worst},
                                    {"tolerance", row.tolerance},
                                    {"trials", row.trials},
                                    {"pass", pass}};
        t.rows.push_back({row.identity, format_number(row.worst), format_number(row.tolerance),
                          std::to_string(row.trials), pass ? "1" : "0"});
    }
    report.tables["residuals"] = std::move(t);
    report.metrics = {{"identities", identities},
                      {"all_pass", all_pass},
                      {"j_gamma_00", p.j_gamma_00()}};
    report.success = all_pass;
}

void run_sweep(const ScenarioConfig& cfg, RunReport& report) {
    Stopwatch clock;
    const RegretProblem base(cfg.regret_config());
    report.timings["setup"] = clock.lap();
    const GammaSweepReport sw = gamma_sweep(base, cfg.gammas);
    report.timings["sweep"] = clock.lap();

    const auto& grid = base.grid();
    UniformSource rng(cfg.seed);
    const std::vector<SpatialField> probes = probe_set(cfg, grid, rng);
    const SpatialField& xi_last = sw.xi0.back();
    double membership = 0.0;
    for (const auto& g : probes) {
        const double gn = base.norm_omega(g);
        if (gn > 0.0) membership = std::max(membership, std::abs(base.inner_omega(g, xi_last)) / gn);
    }
    const bool member_ok = probes.empty() || membership <= kMembershipTol;

    const auto [cmin, cmax] = std::minmax_element(sw.control_norms.begin(), sw.control_norms.end());
    const double ratio = *cmin > 0.0 ? *cmax / *cmin : std::numeric_limits<double>::infinity();
    bool distances_decreasing = true;
    for (std::size_t k = 1; k < sw.pairwise_control_distances.size(); ++k) {
        distances_decreasing = distances_decreasing && sw.pairwise_control_distances[k] <
                                                           sw.pairwise_control_distances[k - 1];
    }
    bool all_converged = true;
    bool objectives_nonpositive = true;
    for (std::size_t k = 0; k < sw.gammas.size(); ++k) {
        all_converged = all_converged && sw.converged[k];
        objectives_nonpositive = objectives_nonpositive && sw.objectives[k] <= 0.0;
    }

    json per_gamma = json::array();
    for (std::size_t k = 0; k < sw.gammas.size(); ++k) {
        per_gamma.push_back({{"gamma", sw.gammas[k]},
                             {"xi0_norm", sw.xi0_norms[k]},
                             {"scaled_xi0_norm", sw.scaled_xi0_norms[k]},
                             {"control_norm", sw.control_norms[k]},
                             {"state_norm", sw.state_norms[k]},
                             {"objective", sw.objectives[k]},
                             {"stationarity_residual", sw.stationarity_residuals[k]},
                             {"cg_iterations", sw.cg_iterations[k]},
                             {"converged", static_cast<bool>(sw.converged[k])}});
    }
    report.metrics = {
        {"fitted_slope", number_or_null(sw.fitted_slope)},
        {"degenerate", sw.degenerate},
        {"control_norm_ratio", number_or_null(ratio)},
        {"pairwise_control_distances", sw.pairwise_control_distances},
        {"distances_decreasing", distances_decreasing},
        {"membership_max", membership},
        {"membership_tolerance", kMembershipTol},
        {"membership_probes", probes.size()},
        {"membership_pass", member_ok},
        {"all_converged", all_converged},
        {"objectives_nonpositive", objectives_nonpositive},
        {"per_gamma", per_gamma},
    };
    report.success = all_converged;

    CsvTable xt;
    xt.header = {"gamma", "xi0_norm", "scaled_xi0_norm", "control_norm", "state_norm",
                 "objective", "cg_iterations"};
    for (std::size_t k = 0; k < sw.gammas.size(); ++k) {
        xt.rows.push_back({format_number(sw.gammas[k]), format_number(sw.xi0_norms[k]),
                           format_number(sw.scaled_xi0_norms[k]),
                           format_number(sw.control_norms[k]), format_number(sw.state_norms[k]),
                           format_number(sw.objectives[k]), std::to_string(sw.cg_iterations[k])});
    }
    report.tables["xi0_vs_gamma"] = std::move(xt);

    CsvTable dt;
    dt.header = {"gamma_from", "gamma_to", "control_distance"};
    for (std::size_t k = 0; k < sw.pairwise_control_distances.size(); ++k) {
        dt.rows.push_back({format_number(sw.gammas[k]), format_number(sw.gammas[k + 1]),
                           format_number(sw.pairwise_control_distances[k])});
    }
    report.tables["control_distance"] = std::move(dt);

    const int mid = std::max(1, base.tgrid().M / 2);
    std::vector<std::string> names;
    std::vector<SpatialField> columns;
    for (std::size_t k = 0; k < sw.gammas.size(); ++k) {
        names.push_back("u_gamma_" + format_label(sw.gammas[k]));
        columns.push_back(sw.controls[k].row(mid).transpose());
    }
    report.tables["controls"] = field_snapshot(grid, names, columns);

    names.clear();
    for (std::size_t k = 0; k < sw.gammas.size(); ++k) {
        names.push_back("xi0_gamma_" + format_label(sw.gammas[k]));
    }
    report.tables["xi0_profiles"] = field_snapshot(grid, names, sw.xi0);
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Solve: return "solve";
        case ScenarioKind::Audit: return "audit";
        case ScenarioKind::Sweep: return "sweep";
    }
    return "solve";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
    if (name == "solve" || name == "run") return ScenarioKind::Solve;
    if (name == "audit") return ScenarioKind::Audit;
    if (name == "sweep") return ScenarioKind::Sweep;
    throw DomainError("config field 'scenario' must be one of solve, audit, sweep; got '" +
                      name + "'");
}

Preset Preset::parse(const std::string& text) {
    static const std::regex call(R"(^\s*([a-z]+)\s*(?:\((.*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, call)) {
        throw DomainError("unrecognised preset '" + text + "'");
    }
    const std::string name = m[1];
    std::vector<double> args;
    if (m[2].matched) {
        std::stringstream list(m[2].str());
        std::string item;
        while (std::getline(list, item, ',')) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(item, &used);
            } catch (const std::exception&) {
                throw DomainError("preset '" + text + "' has a non-numeric argument '" + item + "'");
            }
            if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(value)) {
                throw DomainError("preset '" + text + "' has a non-numeric argument '" + item + "'");
            }
            args.push_back(value);
        }
    }

    Preset p;
    p.text_ = text;
    p.args_ = args;
    if (name == "zero" && args.empty()) {
        p.kind_ = Kind::Zero;
    } else if (name == "gauss" && args.size() == 3) {
        if (!(args[1] > 0.0)) throw DomainError("preset '" + text + "' needs width > 0");
        p.kind_ = Kind::Gauss;
    } else if (name == "sine" && args.size() == 2) {
        p.kind_ = Kind::Sine;
    } else {
        throw DomainError("unrecognised preset '" + text +
                          "'; expected zero, gauss(center,width,amp) or sine(k,amp)");
    }
    return p;
}

double Preset::operator()(double x, double x_l, double x_r) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Gauss: {
            const double z = (x - args_[0]) / args_[1];
            return args_[2] * std::exp(-z * z);
        }
        case Kind::Sine:
            return args_[1] * std::sin(args_[0] * std::numbers::pi * (x - x_l) / (x_r - x_l));
    }
    return 0.0;
}

SpatialField Preset::sample(const SpatialGrid& grid) const {
    SpatialField out(grid.n);
    for (int i = 0; i < grid.n; ++i) out(i) = (*this)(grid.nodes[i], grid.x_l, grid.x_r);
    return out;
}

SpaceTimeField Preset::sample(const SpatialGrid& grid, const TimeGrid& tgrid) const {
    const SpatialField profile = sample(grid);
    SpaceTimeField out(tgrid.M + 1, grid.n);
    for (int m = 0; m <= tgrid.M; ++m) out.row(m) = profile.transpose();
    return out;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    for (const auto& [k, _] : j.items()) {
        if (!kTopLevelKeys.count(k)) field_error(k, "is not a recognised field");
    }

    ScenarioConfig c;
    c.kind = parse_scenario_kind(read_string(j, "scenario", "scenario", "solve"));
    c.s = read_number(j, "s", "s", c.s);
    c.aleph = read_number(j, "aleph", "aleph", c.aleph);
    c.gamma = read_number(j, "gamma", "gamma", c.gamma);

    const json& domain = read_object(j, "domain", {"x_left", "x_right", "nodes"});
    c.x_left = read_number(domain, "x_left", "domain.x_left", c.x_left);
    c.x_right = read_number(domain, "x_right", "domain.x_right", c.x_right);
    c.nodes = static_cast<int>(read_integer(domain, "nodes", "domain.nodes", c.nodes));

    const json& time = read_object(j, "time", {"horizon", "steps"});
    c.horizon = read_number(time, "horizon", "time.horizon", c.horizon);
    c.steps = static_cast<int>(read_integer(time, "steps", "time.steps", c.steps));

    c.source = read_preset(j, "source", "zero");
    c.target = read_preset(j, "target", "zero");

    if (const json* probes = member(j, "probes")) {
        if (!probes->is_array()) field_error("probes", "must be an array of presets");
        for (std::size_t k = 0; k < probes->size(); ++k) {
            const std::string name = "probes[" + std::to_string(k) + "]";
            if (!(*probes)[k].is_string()) field_error(name, "must be a string");
            try {
                c.probes.push_back(Preset::parse((*probes)[k].get<std::string>()));
            } catch (const DomainError& e) {
                field_error(name, e.what());
            }
        }
    }
    const long long random_probes = read_integer(j, "random_probes", "random_probes", c.random_probes);
    if (random_probes < 0 || random_probes > 100000) {
        field_error("random_probes", "must lie in [0, 100000], got " + std::to_string(random_probes));
    }
    c.random_probes = static_cast<int>(random_probes);

    if (const json* gammas = member(j, "gammas")) {
        if (!gammas->is_array()) field_error("gammas", "must be an array of numbers");
        c.gammas.clear();
        for (std::size_t k = 0; k < gammas->size(); ++k) {
            const std::string name = "gammas[" + std::to_string(k) + "]";
            if (!(*gammas)[k].is_number()) field_error(name, "must be a number");
            const double g = (*gammas)[k].get<double>();
            if (!(g > 0.0) || !std::isfinite(g)) {
                field_error(name, "must be positive, got " + format_number(g));
            }
            c.gammas.push_back(g);
        }
    }

    const json& cg = read_object(j, "cg", {"tol", "max_iters"});
    c.cg_tol = read_number(cg, "tol", "cg.tol", c.cg_tol);
    c.cg_max_iters = static_cast<int>(read_integer(cg, "max_iters", "cg.max_iters", c.cg_max_iters));

    if (const json* seed = member(j, "seed")) {
        if (!seed->is_number_integer() || (!seed->is_number_unsigned() && seed->get<long long>() < 0)) {
            field_error("seed", "must be a non-negative integer, got " + seed->dump());
        }
        c.seed = seed->get<std::uint64_t>();
    }

    const json& audit = read_object(j, "audit", {"trials"});
    const long long trials = read_integer(audit, "trials", "audit.trials", c.audit_trials);
    if (trials < 1 || trials > 10000) {
        field_error("audit.trials", "must lie in [1, 10000], got " + std::to_string(trials));
    }
    c.audit_trials = static_cast<int>(trials);

    if (member(j, "output_dir")) c.output_dir = read_string(j, "output_dir", "output_dir", "");

    if (c.kind == ScenarioKind::Sweep) {
        if (c.gammas.size() < 3) field_error("gammas", "needs at least 3 entries for a sweep");
        for (std::size_t k = 1; k < c.gammas.size(); ++k) {
            if (!(c.gammas[k] < c.gammas[k - 1])) field_error("gammas", "must be strictly decreasing");
        }
        if (std::log10(c.gammas.front() / c.gammas.back()) < 3.0 - 1e-12) {
            field_error("gammas", "must span at least 3 decades");
        }
    }

    // Grid and RegretConfig invariants, with the JSON field names in the message.
    c.regret_config().validate();
    return c;
}

ScenarioConfig ScenarioConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

json ScenarioConfig::to_json() const {
    json probe_texts = json::array();
    for (const auto& p : probes) probe_texts.push_back(p.text());
    json j = {
        {"scenario", to_string(kind)},
        {"s", s},
        {"aleph", aleph},
        {"gamma", gamma},
        {"domain", {{"x_left", x_left}, {"x_right", x_right}, {"nodes", nodes}}},
        {"time", {{"horizon", horizon}, {"steps", steps}}},
        {"source", source.text()},
        {"target", target.text()},
        {"probes", probe_texts},
        {"random_probes", random_probes},
        {"gammas", gammas},
        {"cg", {{"tol", cg_tol}, {"max_iters", cg_max_iters}}},
        {"seed", seed},
        {"audit", {{"trials", audit_trials}}},
    };
    return j;
}

RegretConfig ScenarioConfig::regret_config() const {
    RegretConfig r;
    r.s = s;
    r.aleph = aleph;
    r.gamma = gamma;
    try {
        r.grid = build_grid(x_left, x_right, nodes);
    } catch (const DomainError& e) {
        throw DomainError(std::string("config field 'domain': ") + e.what());
    }
    try {
        r.tgrid = build_time_grid(horizon, steps);
    } catch (const DomainError& e) {
        throw DomainError(std::string("config field 'time': ") + e.what());
    }
    r.f = source.sample(r.grid, r.tgrid);
    r.z_d = target.sample(r.grid, r.tgrid);
    r.cg_tol = cg_tol;
    r.cg_max_iters = cg_max_iters;
    return r;
}

UniformSource::UniformSource(std::uint64_t seed) : engine_(seed) {}

double UniformSource::next() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

SpatialField UniformSource::spatial(const SpatialGrid& grid) {
    SpatialField out(grid.n);
    for (int i = 0; i < grid.n; ++i) out(i) = next();
    return out;
}

SpaceTimeField UniformSource::controls(const SpatialGrid& grid, const TimeGrid& tgrid) {
    SpaceTimeField out = zero_spacetime(grid, tgrid);
    for (int m = 1; m <= tgrid.M; ++m) {
        for (int i = 0; i < grid.n; ++i) out(m, i) = next();
    }
    return out;
}

json RunReport::to_json() const {
    json tables_json = json::object();
    for (const auto& [name, table] : tables) {
        tables_json[name] = {{"file", to_string(kind) + "_" + name + ".csv"},
                             {"columns", table.header},
                             {"rows", table.rows.size()}};
    }
    return {{"scenario", to_string(kind)},
            {"config", config},
            {"config_hash", config_hash},
            {"version", version},
            {"metrics", metrics},
            {"success", success},
            {"tables", tables_json}};
}

RunReport run_scenario(const ScenarioConfig& cfg_in, const RunOptions& options) {
    ScenarioConfig cfg = cfg_in;
    if (options.kind) cfg.kind = *options.kind;
    if (options.seed) cfg.seed = *options.seed;

    RunReport report;
    report.kind = cfg.kind;
    report.config = cfg.to_json();
    report.config_hash = oracle::config_hash(report.config.dump());
    report.version = LOWREGRET_VERSION;
    switch (cfg.kind) {
        case ScenarioKind::Solve: run_solve(cfg, report); break;
        case ScenarioKind::Audit: run_audit(cfg, report); break;
        case ScenarioKind::Sweep: run_sweep(cfg, report); break;
    }
    return report;
}

RunReport run_scenario(const fs::path& config_path, const RunOptions& options) {
    ScenarioConfig cfg = ScenarioConfig::load(config_path);
    if (options.kind) cfg.kind = *options.kind;
    if (cfg.kind == ScenarioKind::Sweep) {
        // Re-check sweep-only constraints when the kind came from the command line.
        cfg = ScenarioConfig::from_json(cfg.to_json());
    }
    RunReport report = run_scenario(cfg, options);
    if (options.write_files) {
        write_report_files(report, resolve_output_dir(config_path, cfg, options));
    }
    return report;
}

fs::path resolve_output_dir(const fs::path& config_path, const ScenarioConfig& cfg,
                            const RunOptions& options) {
    if (options.out_dir) return *options.out_dir;
    if (cfg.output_dir && !cfg.output_dir->empty()) return *cfg.output_dir;
    const std::string stem = config_path.stem().string();
    if (const char* root = std::getenv("LOWREGRET_OUTPUT_ROOT"); root && *root) {
        return fs::path(root) / stem;
    }
    return fs::path("lowregret_runs") / stem;
}

std::vector<fs::path> emit_plot_data(const RunReport& report, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + out_dir.string() +
                                 "': " + ec.message());
    }
    std::vector<fs::path> paths;
    for (const auto& [name, table] : report.tables) {
        const fs::path path = out_dir / (to_string(report.kind) + "_" + name + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        const auto write_row = [&](const std::vector<std::string>& row) {
            for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
            out << '\n';
        };
        write_row(table.header);
        for (const auto& row : table.rows) write_row(row);
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
        paths.push_back(path);
    }
    return paths;
}

void write_report_files(const RunReport& report, const fs::path& out_dir) {
    emit_plot_data(report, out_dir);
    const auto write_json = [&](const fs::path& path, const json& j) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    };
    write_json(out_dir / "report.json", report.to_json());
    json timings = json::object();
    for (const auto& [phase, seconds] : report.timings) timings[phase] = seconds;
    write_json(out_dir / "timings.json", {{"timings", timings}});
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace lowregret
