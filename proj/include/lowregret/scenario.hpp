#pragma once

#include "lowregret/optimizer.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lowregret {

enum class ScenarioKind { Solve, Audit, Sweep };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

/// Named analytic profile on the spatial grid, constant in time:
/// "zero", "gauss(center,width,amp)" = amp exp(-((x-center)/width)^2),
/// "sine(k,amp)" = amp sin(k pi (x - x_l)/(x_r - x_l)).
class Preset {
public:
    static Preset parse(const std::string& text);

    double operator()(double x, double x_l, double x_r) const;
    SpatialField sample(const SpatialGrid& grid) const;
    /// The spatial profile repeated on every time slice.
    SpaceTimeField sample(const SpatialGrid& grid, const TimeGrid& tgrid) const;
    const std::string& text() const { return text_; }

private:
    enum class Kind { Zero, Gauss, Sine };
    Kind kind_ = Kind::Zero;
    std::vector<double> args_;
    std::string text_ = "zero";
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Solve;
    double s = 0.5;
    double aleph = 1.0;
    double gamma = 1.0;
    double x_left = -1.0;
    double x_right = 1.0;
    int nodes = 40;
    double horizon = 1.0;
    int steps = 30;
    Preset source;
    Preset target;
    std::vector<Preset> probes;
    int random_probes = 20;
    std::vector<double> gammas{1.0, 1e-1, 1e-2, 1e-3, 1e-4};
    double cg_tol = 1e-11;
    int cg_max_iters = 5000;
    int audit_trials = 20;
    std::uint64_t seed = 42;
    std::optional<std::string> output_dir;

    /// Parses and validates; DomainError messages name the offending field.
    static ScenarioConfig from_json(const nlohmann::json& j);
    static ScenarioConfig load(const std::filesystem::path& path);
    /// Canonical echo with every default filled in.
    nlohmann::json to_json() const;

    RegretConfig regret_config() const;
};

/// Uniform draws in [-1, 1) from std::mt19937_64, whose output sequence is
/// fixed by the standard; the standard distributions are not, so they are
/// avoided.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed);
    double next();
    SpatialField spatial(const SpatialGrid& grid);
    /// Random control: slot 0 stays zero.
    SpaceTimeField controls(const SpatialGrid& grid, const TimeGrid& tgrid);

private:
    std::mt19937_64 engine_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct RunReport {
    ScenarioKind kind = ScenarioKind::Solve;
    nlohmann::json config;
    std::string config_hash;
    std::string version;
    nlohmann::json metrics;
    bool success = false;
    /// Per-metric plot tables keyed by metric name.
    std::map<std::string, CsvTable> tables;
    /// Wall-clock seconds per phase; kept out of report.json.
    std::map<std::string, double> timings;

    /// Everything except timings.
    nlohmann::json to_json() const;
};

struct RunOptions {
    std::optional<ScenarioKind> kind;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    bool write_files = true;
};

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});
/// Loads the config, runs it, writes report.json, timings.json and the plot
/// CSVs into the resolved output directory.
RunReport run_scenario(const std::filesystem::path& config_path, const RunOptions& options = {});

/// --out, then the config's output_dir, then $LOWREGRET_OUTPUT_ROOT/<config stem>,
/// then ./lowregret_runs/<config stem>.
std::filesystem::path resolve_output_dir(const std::filesystem::path& config_path,
                                         const ScenarioConfig& cfg, const RunOptions& options);

/// Writes <scenario>_<metric>.csv for every table; returns the paths in order.
std::vector<std::filesystem::path> emit_plot_data(const RunReport& report,
                                                  const std::filesystem::path& out_dir);

void write_report_files(const RunReport& report, const std::filesystem::path& out_dir);

std::string format_number(double value);

}  // namespace lowregret
