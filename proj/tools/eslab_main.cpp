// eslab: derivative-free optimization laboratory.
//
// Subcommands: run, sweep, suite, grid, robustness, list-landscapes.
// Exit codes: 0 success, 1 validation error (message names the offending
// field) or failing suite checklist, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eslab/csv.hpp"
#include "eslab/harness.hpp"
#include "eslab/landscape.hpp"
#include "eslab/suite.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int parallelism = 1;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("ESLAB_OUT_DIR")) return env;
    return "runs";
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config) {
    if (needs_config) {
        cmd->add_option("--config", opts.config_path, "path to a config file")->required();
    }
    cmd->add_option("--set", opts.overrides,
                    "config override as section.key=value (repeatable)");
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--out", opts.out_dir, "output directory")
        ->default_val(default_out_dir());
    cmd->add_option("--parallelism", opts.parallelism,
                    "max concurrent runs within sweeps/suites")
        ->default_val(1);
}

eslab::ConfigFile load_config(const CommonOptions& opts) {
    eslab::ConfigFile file = eslab::parse_config(eslab::read_text_file(opts.config_path));
    for (const auto& assignment : opts.overrides) eslab::apply_override(file, assignment);
    if (opts.seed) file.top().set("seed", std::to_string(*opts.seed));
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eslab: ES / finite-difference / GA optimization laboratory"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, rob_opts, suite_opts, grid_opts;
    std::string suite_name, grid_landscape;
    int grid_resolution = 101;

    CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment config");
    add_common(run_cmd, run_opts, true);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "execute a config with a [sweep] section");
    add_common(sweep_cmd, sweep_opts, true);

    CLI::App* suite_cmd = app.add_subcommand("suite", "run a shipped figure suite");
    suite_cmd->add_option("name", suite_name, "suite name")->required();
    add_common(suite_cmd, suite_opts, false);

    CLI::App* grid_cmd = app.add_subcommand("grid", "export a landscape heatmap grid CSV");
    grid_cmd->add_option("name", grid_landscape, "landscape name")->required();
    grid_cmd->add_option("--resolution", grid_resolution, "grid resolution")->default_val(101);
    add_common(grid_cmd, grid_opts, false);

    CLI::App* rob_cmd =
        app.add_subcommand("robustness", "compare explicit solutions under perturbation");
    add_common(rob_cmd, rob_opts, true);

    CLI::App* list_cmd = app.add_subcommand("list-landscapes", "list landscapes and parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            return app.exit(e);
        }
        std::cerr << e.what() << "\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (run_cmd->parsed()) {
            const eslab::ExperimentConfig cfg =
                eslab::parse_experiment_config(load_config(run_opts));
            const eslab::RunArtifacts artifacts =
                eslab::run_experiment(cfg, run_opts.out_dir);
            const auto& fin = artifacts.final_record();
            std::cout << "run " << artifacts.run_id << ": final iterate";
            for (double x : fin.iterate) std::cout << " " << eslab::format_number(x);
            std::cout << ", fitness " << eslab::format_number(fin.fitness_at_iterate)
                      << ", artifacts in " << artifacts.dir.string() << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            const eslab::SweepConfig cfg =
                eslab::parse_sweep_config(load_config(sweep_opts));
            const eslab::SweepResult result = eslab::run_sweep(cfg, sweep_opts.out_dir);
            std::cout << "sweep summary: " << result.summary_path.string() << "\n";
            for (const auto& failure : result.failures) {
                if (!failure.empty()) std::cerr << "run failed: " << failure << "\n";
            }
            return std::all_of(result.failures.begin(), result.failures.end(),
                               [](const std::string& f) { return f.empty(); })
                       ? 0
                       : 2;
        }
        if (suite_cmd->parsed()) {
            const eslab::SuiteResult result = eslab::run_figure_suite(
                suite_name, suite_opts.out_dir, suite_opts.seed, suite_opts.parallelism);
            std::cout << result.checklist_text();
            std::cout << "checklist: " << (result.dir / "checklist.txt").string() << "\n";
            return result.all_passed() ? 0 : 1;
        }
        if (grid_cmd->parsed()) {
            std::vector<std::pair<std::string, double>> overrides;
            for (const auto& assignment : grid_opts.overrides) {
                const auto eq = assignment.find('=');
                if (eq == std::string::npos) {
                    throw eslab::ConfigError("--set", "expected key=value");
                }
                std::string key = assignment.substr(0, eq);
                if (key.starts_with("landscape.")) key = key.substr(10);
                overrides.emplace_back(key, std::stod(assignment.substr(eq + 1)));
            }
            const eslab::Landscape landscape = eslab::make_landscape(grid_landscape, overrides);
            std::filesystem::create_directories(grid_opts.out_dir);
            const std::filesystem::path path =
                std::filesystem::path(grid_opts.out_dir) / (grid_landscape + "_grid.csv");
            eslab::write_text_file(path.string(),
                                   eslab::grid_to_csv(eslab::grid_sample(landscape,
                                                                         grid_resolution)));
            std::cout << "grid: " << path.string() << "\n";
            return 0;
        }
        if (rob_cmd->parsed()) {
            const eslab::ComparisonConfig cfg =
                eslab::parse_comparison_config(load_config(rob_opts));
            eslab::run_comparison(cfg, rob_opts.out_dir);
            std::cout << "comparison artifacts in "
                      << (std::filesystem::path(rob_opts.out_dir) / cfg.run_id).string() << "\n";
            return 0;
        }
        if (list_cmd->parsed()) {
            for (const auto& name : eslab::landscape_names()) {
                std::cout << name << "\n";
                for (const auto& [k, v] : eslab::default_landscape_params(name)) {
                    std::cout << "  " << k << " " << eslab::format_number(v) << "\n";
                }
            }
            return 0;
        }
    } catch (const eslab::ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
