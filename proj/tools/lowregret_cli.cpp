// Command-line driver: run | audit | sweep | validate <config.json>

#include "lowregret/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitFailed = 3;

void print_summary(const lowregret::RunReport& report, const std::filesystem::path& dir) {
    std::cout << to_string(report.kind) << ": " << (report.success ? "ok" : "FAILED")
              << "  config " << report.config_hash << "\n";
    const auto& m = report.metrics;
    switch (report.kind) {
        case lowregret::ScenarioKind::Solve:
            std::cout << "  objective      " << m["objective"] << "\n"
                      << "  cg iterations  " << m["cg_iterations"] << "\n"
                      << "  max residual   " << m["max_residual"] << "\n";
            break;
        case lowregret::ScenarioKind::Audit:
            for (const auto& [name, row] : m["identities"].items()) {
                std::cout << "  " << (row["pass"].get<bool>() ? "pass " : "FAIL ") << name << "  "
                          << row["max_relative_residual"] << "\n";
            }
            break;
        case lowregret::ScenarioKind::Sweep:
            std::cout << "  fitted slope   " << m["fitted_slope"] << "\n"
                      << "  norm ratio     " << m["control_norm_ratio"] << "\n"
                      << "  membership     " << m["membership_max"] << "\n";
            break;
    }
    std::cout << "  output         " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-regret control of fractional diffusion with unknown initial data"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool quiet = false;

    const auto add_common = [&](CLI::App* cmd, bool runs) {
        cmd->add_option("config", config_path, "scenario config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        if (runs) {
            cmd->add_option("--out", out_dir,
                            "output directory (default $LOWREGRET_OUTPUT_ROOT/<config stem>)");
            cmd->add_option("--seed", seed, "override the config seed");
        }
        cmd->add_flag("--quiet", quiet, "suppress the summary");
    };
    CLI::App* run = app.add_subcommand("run", "run the scenario named in the config");
    CLI::App* audit = app.add_subcommand("audit", "identity audit on random data");
    CLI::App* sweep = app.add_subcommand("sweep", "gamma continuation sweep");
    CLI::App* validate = app.add_subcommand("validate", "parse and validate only");
    for (CLI::App* cmd : {run, audit, sweep}) add_common(cmd, true);
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const auto cfg = lowregret::ScenarioConfig::load(config_path);
            if (!quiet) std::cout << "valid " << to_string(cfg.kind) << " config\n";
            return kExitOk;
        }

        lowregret::RunOptions options;
        if (audit->parsed()) options.kind = lowregret::ScenarioKind::Audit;
        if (sweep->parsed()) options.kind = lowregret::ScenarioKind::Sweep;
        CLI::App* active = run->parsed() ? run : (audit->parsed() ? audit : sweep);
        if (active->count("--out")) options.out_dir = out_dir;
        if (active->count("--seed")) options.seed = seed;

        const lowregret::RunReport report = lowregret::run_scenario(config_path, options);
        if (!quiet) {
            auto cfg = lowregret::ScenarioConfig::load(config_path);
            print_summary(report, lowregret::resolve_output_dir(config_path, cfg, options));
        }
        return report.success ? kExitOk : kExitFailed;
    } catch (const lowregret::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const lowregret::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
