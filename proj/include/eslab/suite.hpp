#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eslab/harness.hpp"
#include "eslab/shipped_configs.hpp"

namespace eslab {

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "donut",        "narrowing_path",      "fleeting_peaks",
        "gradient_gap", "gradient_cliff",      "robustness_comparison"};
    return names;
}

inline const std::string& shipped_config(const std::string& name) {
    const auto& table = shipped::configs();
    auto it = table.find(name);
    if (it == table.end()) {
        throw ConfigError("config", "no shipped config named '" + name + "'");
    }
    return it->second;
}

struct ChecklistLine {
    bool passed = false;
    std::string criterion;  // which acceptance criterion the line maps to
    std::string text;
};

struct SuiteResult {
    std::string name;
    std::filesystem::path dir;
    std::vector<ChecklistLine> lines;
    std::map<std::string, RunArtifacts> runs;

    bool all_passed() const {
        for (const auto& line : lines) {
            if (!line.passed) return false;
        }
        return true;
    }

    std::string checklist_text() const {
        std::ostringstream out;
        for (const auto& line : lines) {
            out << (line.passed ? "PASS" : "FAIL") << " [" << line.criterion << "] "
                << line.text << "\n";
        }
        return out.str();
    }
};

namespace detail {

inline ExperimentConfig load_shipped(const std::string& name,
                                     std::optional<std::uint64_t> seed_override) {
    ConfigFile file = parse_config(shipped_config(name));
    if (seed_override) file.top().set("seed", std::to_string(*seed_override));
    return parse_experiment_config(file);
}

// Runs the named shipped configs into dir, optionally concurrently. Each run
// owns its artifact directory, so parallel execution cannot change results.
inline std::map<std::string, RunArtifacts> run_shipped(
    const std::vector<std::string>& names, const std::filesystem::path& dir,
    std::optional<std::uint64_t> seed_override, int parallelism) {
    std::map<std::string, RunArtifacts> out;
    if (parallelism > 1) {
        std::vector<std::future<RunArtifacts>> futures;
        for (const auto& name : names) {
            futures.push_back(std::async(std::launch::async, [&, name] {
                return run_experiment(load_shipped(name, seed_override), dir);
            }));
        }
        for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = futures[i].get();
    } else {
        for (const auto& name : names) {
            out[name] = run_experiment(load_shipped(name, seed_override), dir);
        }
    }
    return out;
}

inline double param_of(const RunArtifacts& artifacts, const std::string& key) {
    for (const auto& [k, v] : artifacts.config.landscape_params) {
        if (k == key) return v;
    }
    throw std::logic_error("missing landscape parameter " + key);
}

inline std::string fmt2(double v) { return format_number(v); }

}  // namespace detail

// Executes every treatment of one figure's setup and evaluates its
// behavioral checklist. Each checklist line names the acceptance criterion
// it enforces.
inline SuiteResult run_figure_suite(const std::string& suite,
                                    const std::filesystem::path& out_root,
                                    std::optional<std::uint64_t> seed_override = std::nullopt,
                                    int parallelism = 1) {
    SuiteResult result;
    result.name = suite;
    result.dir = out_root / suite;
    std::filesystem::create_directories(result.dir);
    auto add = [&](bool passed, const std::string& criterion, const std::string& text) {
        result.lines.push_back({passed, criterion, text});
    };
    using detail::fmt2;

    if (suite == "donut") {
        result.runs = detail::run_shipped(
            {"donut_es_s016", "donut_es_s004", "donut_es_s0002", "donut_fd"}, result.dir,
            seed_override, parallelism);
        const RunArtifacts& es016 = result.runs.at("donut_es_s016");
        const RunArtifacts& es004 = result.runs.at("donut_es_s004");
        const RunArtifacts& es0002 = result.runs.at("donut_es_s0002");
        const RunArtifacts& fd = result.runs.at("donut_fd");
        const ParamVector center = {detail::param_of(es016, "center_x"),
                                    detail::param_of(es016, "center_y")};
        const double hole = detail::param_of(es016, "hole_radius");
        const double amplitude = detail::param_of(es016, "amplitude");
        const double d016 = distance(es016.final_record().iterate, center);
        const double d004 = distance(es004.final_record().iterate, center);
        const double d0002 = distance(es0002.final_record().iterate, center);
        add(d016 < 0.05, "criterion 1",
            "sigma=0.16 final mean within 0.05 of the hole center (dist=" + fmt2(d016) + ")");
        add(d016 < d004 && d004 < d0002, "criterion 1",
            "final-mean distance to center strictly increases over sigma {0.16, 0.04, 0.002} "
            "(dists=" + fmt2(d016) + ", " + fmt2(d004) + ", " + fmt2(d0002) + ")");
        add(std::abs(d0002 - hole) <= 0.02, "criterion 1",
            "sigma=0.002 final mean within 0.02 of the hole-radius circle (|dist-hole|=" +
                fmt2(std::abs(d0002 - hole)) + ")");
        const double to_fd = distance(es0002.final_record().iterate, fd.final_record().iterate);
        add(to_fd <= 0.05, "criterion 1",
            "sigma=0.002 final mean matches the FD final point within 0.05 (dist=" +
                fmt2(to_fd) + ")");
        const DivergencePoint& fin = es016.divergence->back();
        add(fin.expected_fitness - fin.fitness_at_mean >= 10.0 * 1e-3 &&
                fin.fitness_at_mean < 0.01 * amplitude,
            "criterion 2",
            "sigma=0.16 final iterate: expected fitness exceeds fitness-at-mean by >= 10x the "
            "quadrature tolerance and fitness-at-mean < 0.01*amplitude (J=" +
                fmt2(fin.expected_fitness) + ", f=" + fmt2(fin.fitness_at_mean) + ")");
    } else if (suite == "narrowing_path") {
        result.runs = detail::run_shipped({"narrowing_path_es_s012", "narrowing_path_es_s004",
                                           "narrowing_path_es_s00005", "narrowing_path_fd"},
                                          result.dir, seed_override, parallelism);
        const double x012 = result.runs.at("narrowing_path_es_s012").final_record().iterate[0];
        const double x004 = result.runs.at("narrowing_path_es_s004").final_record().iterate[0];
        const double x00005 =
            result.runs.at("narrowing_path_es_s00005").final_record().iterate[0];
        const double xfd = result.runs.at("narrowing_path_fd").final_record().iterate[0];
        add(x012 < x004 && x004 < x00005, "criterion 3",
            "final mean x strictly increases as sigma decreases over {0.12, 0.04, 0.0005} (x=" +
                fmt2(x012) + ", " + fmt2(x004) + ", " + fmt2(x00005) + ")");
        add(x00005 <= xfd, "criterion 3",
            "sigma=0.0005 final x does not exceed FD's (x=" + fmt2(x00005) + " vs " +
                fmt2(xfd) + ")");
        add(xfd >= 0.95, "criterion 3",
            "FD traverses the path (final x=" + fmt2(xfd) + " >= 0.95)");
    } else if (suite == "fleeting_peaks") {
        result.runs = detail::run_shipped(
            {"fleeting_peaks_es_s016", "fleeting_peaks_es_s0048", "fleeting_peaks_es_s0002",
             "fleeting_peaks_fd", "fleeting_peaks_ga"},
            result.dir, seed_override, parallelism);
        const RunArtifacts& es016 = result.runs.at("fleeting_peaks_es_s016");
        const ParamVector goal = {detail::param_of(es016, "goal_x"),
                                  detail::param_of(es016, "goal_y")};
        const ParamVector bump1 = {detail::param_of(es016, "bump_first_x"),
                                   detail::param_of(es016, "bump_y")};
        const double goal_width = detail::param_of(es016, "goal_width");
        const double bump_width = detail::param_of(es016, "bump_width");
        const double d_goal = distance(es016.final_record().iterate, goal);
        add(d_goal <= goal_width, "criterion 4",
            "sigma=0.16 final mean within goal_width of the goal (dist=" + fmt2(d_goal) + ")");
        const double d0002 = distance(
            result.runs.at("fleeting_peaks_es_s0002").final_record().iterate, bump1);
        add(d0002 <= 2.0 * bump_width, "criterion 4",
            "sigma=0.002 final mean within 2*bump_width of the first bump (dist=" +
                fmt2(d0002) + ")");
        const double dfd =
            distance(result.runs.at("fleeting_peaks_fd").final_record().iterate, bump1);
        add(dfd <= 2.0 * bump_width, "criterion 4",
            "FD final point within 2*bump_width of the first bump (dist=" + fmt2(dfd) + ")");
        const double d0048 = distance(
            result.runs.at("fleeting_peaks_es_s0048").final_record().iterate, bump1);
        add(d0048 > 2.0 * bump_width, "criterion 4",
            "sigma=0.048 final mean hops past the first bump (dist=" + fmt2(d0048) + ")");
    } else if (suite == "gradient_gap") {
        result.runs = detail::run_shipped(
            {"gradient_gap_es_s018", "gradient_gap_fd", "gradient_gap_fd_momentum"},
            result.dir, seed_override, parallelism);
        const RunArtifacts& es = result.runs.at("gradient_gap_es_s018");
        const double gap_left = detail::param_of(es, "gap_left");
        const double gap_right = detail::param_of(es, "gap_right");
        const double x_es = es.final_record().iterate[0];
        const double x_fd = result.runs.at("gradient_gap_fd").final_record().iterate[0];
        const double x_mom =
            result.runs.at("gradient_gap_fd_momentum").final_record().iterate[0];
        add(x_es > gap_right, "criterion 5",
            "ES sigma=0.18 crosses the gap (final x=" + fmt2(x_es) + " > gap_right)");
        add(x_fd <= gap_left + 1e-3, "criterion 5",
            "vanilla FD stays at the gap edge (final x=" + fmt2(x_fd) +
                " <= gap_left + 0.001)");
        add(x_mom > gap_right, "criterion 5",
            "FD with momentum 0.9 crosses the gap (final x=" + fmt2(x_mom) + ")");
        bool zero_mean_positive_expectation = false;
        for (const auto& pt : *es.divergence) {
            if (pt.fitness_at_mean == 0.0 && pt.expected_fitness > 0.0) {
                zero_mean_positive_expectation = true;
                break;
            }
        }
        add(zero_mean_positive_expectation, "criterion 2",
            "ES sigma=0.18 crossing contains an iterate with fitness-at-mean 0 and expected "
            "fitness > 0");
    } else if (suite == "gradient_cliff") {
        result.runs = detail::run_shipped(
            {"gradient_cliff_es_s018", "gradient_cliff_fd", "gradient_cliff_fd_momentum"},
            result.dir, seed_override, parallelism);
        const RunArtifacts& es = result.runs.at("gradient_cliff_es_s018");
        const double gap_left = detail::param_of(es, "gap_left");
        const double sigma = std::get<EsConfig>(es.config.optimizer).sigma;
        const double x_es = es.final_record().iterate[0];
        add(x_es < gap_left + sigma, "criterion 5",
            "ES sigma=0.18 remains rooted before the cliff (final x=" + fmt2(x_es) +
                " < gap_left + sigma)");
        const RunArtifacts& mom = result.runs.at("gradient_cliff_fd_momentum");
        const double x_mom = mom.final_record().iterate[0];
        const double f_mom = mom.final_record().fitness_at_iterate;
        add(x_mom > gap_left && f_mom == 0.0, "criterion 5",
            "FD with momentum 0.9 jumps into the chasm (final x=" + fmt2(x_mom) +
                " > gap_left, final fitness=" + fmt2(f_mom) + ")");
    } else if (suite == "robustness_comparison") {
        result.runs = detail::run_shipped(
            {"donut_es_s016", "donut_fd", "fleeting_peaks_es_s016", "fleeting_peaks_ga"},
            result.dir, seed_override, parallelism);
        const std::uint64_t seed = seed_override.value_or(11);
        const int count = 1000;

        // Donut: ES-trained vs FD-trained solutions, cloud sigma = ES's 0.16.
        {
            const RunArtifacts& es = result.runs.at("donut_es_s016");
            const RunArtifacts& fd = result.runs.at("donut_fd");
            const Landscape landscape = es.config.make();
            Objective objective = [&landscape](const ParamVector& p) {
                return landscape.evaluate(p);
            };
            ComparisonTable table = compare_solutions(
                objective, {"es", "fd"},
                {es.final_record().iterate, fd.final_record().iterate}, {0.16}, count, 1, 1,
                derive_seed(seed, 1), Alternative::greater);
            for (std::size_t i = 0; i < 2; ++i) {
                const std::string& name = table.solution_names[i];
                write_text_file((result.dir / ("donut_" + name + "_robustness.csv")).string(),
                                robustness_to_csv(table.reports[i][0]));
                write_text_file(
                    (result.dir / ("donut_" + name + "_robustness_summary.txt")).string(),
                    robustness_summary(table.reports[i][0]));
            }
            add(table.base_match[0][1], "criterion 9",
                "donut ES and FD base fitnesses within 5% of each other (" +
                    fmt2(table.reports[0][0].base_performance) + " vs " +
                    fmt2(table.reports[1][0].base_performance) + ")");
            const bool score_ok = !table.reports[0][0].score_undefined &&
                                  !table.reports[1][0].score_undefined &&
                                  table.reports[0][0].robustness_score >
                                      table.reports[1][0].robustness_score;
            add(score_ok, "criterion 9",
                "donut ES robustness_score exceeds FD's (scores " +
                    (table.reports[0][0].score_undefined
                         ? std::string("undefined: both solutions have base fitness 0")
                         : fmt2(table.reports[0][0].robustness_score) + " vs " +
                               fmt2(table.reports[1][0].robustness_score)) +
                    "; cloud medians " + fmt2(table.reports[0][0].quartiles.median) + " vs " +
                    fmt2(table.reports[1][0].quartiles.median) + ")");
            const MannWhitneyResult& mw = table.pairwise[0][0][1];
            add(mw.p_value < 0.01, "criterion 9",
                "donut ES vs FD one-sided Mann-Whitney p < 0.01 (p=" + fmt2(mw.p_value) + ")");
        }

        // Fleeting Peaks: ES-trained vs GA-trained at ES's training sigma.
        {
            const RunArtifacts& es = result.runs.at("fleeting_peaks_es_s016");
            const RunArtifacts& ga = result.runs.at("fleeting_peaks_ga");
            const Landscape landscape = es.config.make();
            Objective objective = [&landscape](const ParamVector& p) {
                return landscape.evaluate(p);
            };
            ComparisonTable table = compare_solutions(
                objective, {"es", "ga"},
                {es.final_record().iterate, ga.final_record().iterate}, {0.16}, count, 1, 1,
                derive_seed(seed, 2), Alternative::greater);
            for (std::size_t i = 0; i < 2; ++i) {
                const std::string& name = table.solution_names[i];
                write_text_file(
                    (result.dir / ("fleeting_peaks_" + name + "_robustness.csv")).string(),
                    robustness_to_csv(table.reports[i][0]));
                write_text_file(
                    (result.dir / ("fleeting_peaks_" + name + "_robustness_summary.txt"))
                        .string(),
                    robustness_summary(table.reports[i][0]));
            }
            const MannWhitneyResult& mw = table.pairwise[0][0][1];
            add(mw.p_value < 0.01, "criterion 9",
                "fleeting peaks ES vs GA one-sided Mann-Whitney p < 0.01 (p=" +
                    fmt2(mw.p_value) + ")");
        }
    } else {
        throw ConfigError("suite", "unknown suite '" + suite + "'");
    }

    write_text_file((result.dir / "checklist.txt").string(), result.checklist_text());
    return result;
}

}  // namespace eslab
