// Benchmark command line for the secure-estimation RIS design library.
//
// Subcommands:
//   run <config>          sweep the design algorithms over a grid, emit CSV
//   feasibility <config>  sweep the smallest admissible secrecy limit
//   mse <config>          sweep with Monte Carlo estimator MSE columns
//   validate <config>     parse and check a scenario config
//
// Exit codes: 0 success, 2 configuration error (diagnostics on stderr),
// 1 runtime failure.  The master seed is printed to stderr on every run.

#include <CLI11.hpp>

#include "risfim/sweep.hpp"

#include <iostream>

namespace {

struct SweepArgs {
    std::string config_path;
    std::string output_override;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& args) {
    cmd->add_option("config", args.config_path, "scenario config file")->required();
    cmd->add_option("--output", args.output_override, "output CSV path (overrides config)");
    cmd->add_option("--seed", args.seed_override, "master seed (overrides config)")
        ->each([&args](const std::string&) { args.has_seed_override = true; });
}

int run_sweep_command(const SweepArgs& args, risfim::SweepMode mode) {
    risfim::ScenarioConfig cfg;
    try {
        cfg = risfim::parse_scenario_config_file(args.config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (args.has_seed_override) cfg.seed = args.seed_override;
    if (!args.output_override.empty()) cfg.output = args.output_override;

    std::cerr << "master seed: " << cfg.seed << "\n";
    try {
        const auto records = risfim::run_sweep(cfg, mode);
        risfim::write_sweep_csv(records, cfg.output);
        int errors = 0;
        for (const auto& r : records)
            if (!r.error.empty()) {
                std::cerr << "row error (" << r.algorithm << " k=" << r.k << " r=" << r.r
                          << " delta=" << r.delta << "): " << r.error << "\n";
                ++errors;
            }
        std::cerr << "wrote " << records.size() << " rows to " << cfg.output << "\n";
        return errors == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int validate_command(const std::string& config_path) {
    try {
        risfim::parse_scenario_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    std::cout << "valid\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure-estimation RIS design benchmarks"};
    app.require_subcommand(1);

    SweepArgs run_args, feas_args, mse_args;
    std::string validate_path;

    CLI::App* run = app.add_subcommand("run", "sweep design algorithms, emit CSV");
    add_sweep_options(run, run_args);
    CLI::App* feas = app.add_subcommand("feasibility", "sweep smallest secrecy limit");
    add_sweep_options(feas, feas_args);
    CLI::App* mse = app.add_subcommand("mse", "sweep with Monte Carlo estimator MSE");
    add_sweep_options(mse, mse_args);
    CLI::App* validate = app.add_subcommand("validate", "parse and check a scenario config");
    validate->add_option("config", validate_path, "scenario config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) return run_sweep_command(run_args, risfim::SweepMode::Traces);
    if (feas->parsed()) return run_sweep_command(feas_args, risfim::SweepMode::Feasibility);
    if (mse->parsed()) return run_sweep_command(mse_args, risfim::SweepMode::Mse);
    return validate_command(validate_path);
}
