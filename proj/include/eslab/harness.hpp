#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "eslab/config.hpp"
#include "eslab/csv.hpp"
#include "eslab/expectation.hpp"
#include "eslab/landscape.hpp"
#include "eslab/optimize.hpp"
#include "eslab/robustness.hpp"
#include "eslab/rng.hpp"

namespace eslab {

struct RobustnessParams {
    double sigma = 0.16;
    int count = 1000;
    int per_trials = 1;     // landscapes are deterministic; paper mode uses 100
    int base_trials = 1;    // paper mode uses 1000
};

using OptimizerVariant = std::variant<EsConfig, FdConfig, GaConfig>;

struct ExperimentConfig {
    std::string run_id;
    std::uint64_t seed = 0;
    std::set<std::string> outputs = {"trajectory"};
    ParamVector start;
    std::string landscape_name;
    std::vector<std::pair<std::string, double>> landscape_params;  // fully resolved
    OptimizerVariant optimizer;
    int grid_resolution = 101;
    int quadrature_nodes = 41;
    std::optional<RobustnessParams> robustness;

    Landscape make() const { return make_landscape(landscape_name, landscape_params); }

    bool is_es() const { return std::holds_alternative<EsConfig>(optimizer); }
};

namespace detail {

inline OptimizerVariant parse_optimizer(const ConfigSection& section, std::uint64_t seed) {
    SectionReader opt(section);
    const std::string type = opt.require_string("type");
    if (type == "es") {
        EsConfig es;
        es.sigma = opt.get_double("sigma");
        es.population = static_cast<int>(opt.get_int("population", 64));
        es.learning_rate = opt.get_double("learning_rate");
        es.mirrored = opt.get_bool("mirrored", true);
        es.rank_shaping = opt.get_bool("rank_shaping", false);
        es.iterations = static_cast<int>(opt.get_int("iterations"));
        es.seed = seed;
        opt.reject_unknown();
        if (!(es.sigma > 0.0)) throw ConfigError("optimizer.sigma", "must be > 0");
        if (es.population < 2 || (es.mirrored && es.population % 2 != 0)) {
            throw ConfigError("optimizer.population",
                              "must be >= 2 (and even with mirrored sampling)");
        }
        if (es.iterations < 1) throw ConfigError("optimizer.iterations", "must be >= 1");
        return es;
    }
    if (type == "fd") {
        FdConfig fd;
        fd.epsilon = opt.get_double("epsilon", 1e-7);
        fd.learning_rate = opt.get_double("learning_rate");
        fd.momentum_beta = opt.get_double("momentum_beta", 0.0);
        fd.iterations = static_cast<int>(opt.get_int("iterations"));
        opt.reject_unknown();
        if (!(fd.epsilon > 0.0)) throw ConfigError("optimizer.epsilon", "must be > 0");
        if (!(fd.momentum_beta >= 0.0 && fd.momentum_beta < 1.0)) {
            throw ConfigError("optimizer.momentum_beta", "must be in [0,1)");
        }
        if (fd.iterations < 1) throw ConfigError("optimizer.iterations", "must be >= 1");
        return fd;
    }
    if (type == "ga") {
        GaConfig ga;
        ga.population = static_cast<int>(opt.get_int("population", 200));
        ga.truncation_fraction = opt.get_double("truncation_fraction", 0.05);
        ga.mutation_sigma = opt.get_double("mutation_sigma");
        ga.elitism = static_cast<int>(opt.get_int("elitism", 1));
        ga.iterations = static_cast<int>(opt.get_int("iterations"));
        ga.seed = seed;
        opt.reject_unknown();
        if (ga.population < 2) throw ConfigError("optimizer.population", "must be >= 2");
        if (!(ga.truncation_fraction > 0.0 && ga.truncation_fraction <= 1.0)) {
            throw ConfigError("optimizer.truncation_fraction", "must be in (0,1]");
        }
        if (ga.iterations < 1) throw ConfigError("optimizer.iterations", "must be >= 1");
        return ga;
    }
    throw ConfigError("optimizer.type", "must be one of es/fd/ga, got '" + type + "'");
}

inline std::set<std::string> parse_outputs(const std::string& text) {
    static const std::set<std::string> known = {"trajectory", "grid", "divergence",
                                               "robustness"};
    std::set<std::string> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        token = detail::trim(token);
        if (token.empty()) continue;
        if (!known.contains(token)) {
            throw ConfigError("outputs", "unknown output '" + token + "'");
        }
        out.insert(token);
    }
    if (out.empty()) throw ConfigError("outputs", "no outputs requested");
    return out;
}

}  // namespace detail

// Interprets and validates a parsed config file as an experiment. Every
// diagnostic names the offending field.
inline ExperimentConfig parse_experiment_config(const ConfigFile& file) {
    ExperimentConfig cfg;
    SectionReader top(file.top());
    cfg.run_id = top.require_string("run_id");
    cfg.seed = top.get_uint64("seed", std::uint64_t{0});
    cfg.outputs = detail::parse_outputs(top.get_string("outputs", "trajectory"));
    cfg.start = top.get_doubles("start");
    cfg.grid_resolution = static_cast<int>(top.get_int("grid_resolution", 101));
    cfg.quadrature_nodes = static_cast<int>(top.get_int("quadrature_nodes", 41));
    top.reject_unknown();

    const ConfigSection* landscape_section = file.find("landscape");
    if (landscape_section == nullptr) throw ConfigError("landscape", "missing section");
    SectionReader land(*landscape_section);
    cfg.landscape_name = land.require_string("name");
    cfg.landscape_params = default_landscape_params(cfg.landscape_name);
    for (const auto& [k, v] : land.remaining()) {
        auto it = std::find_if(cfg.landscape_params.begin(), cfg.landscape_params.end(),
                               [&](const auto& kv) { return kv.first == k; });
        if (it == cfg.landscape_params.end()) {
            throw ConfigError("landscape." + k, "unknown parameter for landscape '" +
                                                    cfg.landscape_name + "'");
        }
        try {
            std::size_t used = 0;
            it->second = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError("landscape." + k, "expected a number, got '" + v + "'");
        }
    }

    const ConfigSection* optimizer_section = file.find("optimizer");
    if (optimizer_section == nullptr) throw ConfigError("optimizer", "missing section");
    cfg.optimizer = detail::parse_optimizer(*optimizer_section, cfg.seed);

    if (const ConfigSection* rob = file.find("robustness")) {
        SectionReader r(*rob);
        RobustnessParams params;
        params.sigma = r.get_double("sigma");
        params.count = static_cast<int>(r.get_int("count", 1000));
        params.per_trials = static_cast<int>(r.get_int("per_trials", 1));
        params.base_trials = static_cast<int>(r.get_int("base_trials", 1));
        r.reject_unknown();
        cfg.robustness = params;
    }

    for (const auto& section : file.sections) {
        if (section.name.empty() || section.name == "landscape" ||
            section.name == "optimizer" || section.name == "robustness") {
            continue;
        }
        throw ConfigError(section.name, "unknown section");
    }

    // Cross-field validation.
    Landscape landscape = cfg.make();  // parameter constraint errors surface here
    if (static_cast<int>(cfg.start.size()) != landscape.dim()) {
        throw ConfigError("start", "dimension " + std::to_string(cfg.start.size()) +
                                       " does not match landscape dimension " +
                                       std::to_string(landscape.dim()));
    }
    if (cfg.outputs.contains("divergence") && !cfg.is_es()) {
        throw ConfigError("outputs", "divergence output requires an es optimizer");
    }
    if (cfg.outputs.contains("robustness") && !cfg.robustness) {
        throw ConfigError("robustness", "outputs include robustness but no [robustness] section");
    }
    if (cfg.grid_resolution < 2) throw ConfigError("grid_resolution", "must be >= 2");
    if (cfg.quadrature_nodes < 3 || cfg.quadrature_nodes % 2 == 0) {
        throw ConfigError("quadrature_nodes", "must be odd and >= 3");
    }
    return cfg;
}

// Serializes a fully resolved config; re-running this text reproduces the
// run byte-for-byte.
inline ConfigFile resolved_config_file(const ExperimentConfig& cfg) {
    ConfigFile file;
    file.top().set("run_id", cfg.run_id);
    file.top().set("seed", std::to_string(cfg.seed));
    {
        std::string joined;
        for (const auto& o : cfg.outputs) joined += (joined.empty() ? "" : ",") + o;
        file.top().set("outputs", joined);
    }
    {
        std::string joined;
        for (double v : cfg.start) joined += (joined.empty() ? "" : " ") + format_number(v);
        file.top().set("start", joined);
    }
    file.top().set("grid_resolution", std::to_string(cfg.grid_resolution));
    file.top().set("quadrature_nodes", std::to_string(cfg.quadrature_nodes));

    ConfigSection& land = file.get_or_create("landscape");
    land.set("name", cfg.landscape_name);
    for (const auto& [k, v] : cfg.landscape_params) land.set(k, format_number(v));

    ConfigSection& opt = file.get_or_create("optimizer");
    if (const EsConfig* es = std::get_if<EsConfig>(&cfg.optimizer)) {
        opt.set("type", "es");
        opt.set("sigma", format_number(es->sigma));
        opt.set("population", std::to_string(es->population));
        opt.set("learning_rate", format_number(es->learning_rate));
        opt.set("mirrored", es->mirrored ? "true" : "false");
        opt.set("rank_shaping", es->rank_shaping ? "true" : "false");
        opt.set("iterations", std::to_string(es->iterations));
    } else if (const FdConfig* fd = std::get_if<FdConfig>(&cfg.optimizer)) {
        opt.set("type", "fd");
        opt.set("epsilon", format_number(fd->epsilon));
        opt.set("learning_rate", format_number(fd->learning_rate));
        opt.set("momentum_beta", format_number(fd->momentum_beta));
        opt.set("iterations", std::to_string(fd->iterations));
    } else {
        const GaConfig& ga = std::get<GaConfig>(cfg.optimizer);
        opt.set("type", "ga");
        opt.set("population", std::to_string(ga.population));
        opt.set("truncation_fraction", format_number(ga.truncation_fraction));
        opt.set("mutation_sigma", format_number(ga.mutation_sigma));
        opt.set("elitism", std::to_string(ga.elitism));
        opt.set("iterations", std::to_string(ga.iterations));
    }
    if (cfg.robustness) {
        ConfigSection& rob = file.get_or_create("robustness");
        rob.set("sigma", format_number(cfg.robustness->sigma));
        rob.set("count", std::to_string(cfg.robustness->count));
        rob.set("per_trials", std::to_string(cfg.robustness->per_trials));
        rob.set("base_trials", std::to_string(cfg.robustness->base_trials));
    }
    return file;
}

struct RunArtifacts {
    std::string run_id;
    std::filesystem::path dir;
    ExperimentConfig config;
    std::vector<TrajectoryRecord> trajectory;
    std::optional<std::vector<DivergencePoint>> divergence;
    std::optional<RobustnessReport> robustness;

    const TrajectoryRecord& final_record() const { return trajectory.back(); }
};

// Executes one experiment and writes manifest + requested artifacts into
// <out_root>/<run_id>/. On an evaluation failure the partial trajectory and
// a failure note are written before the error propagates.
inline RunArtifacts run_experiment(const ExperimentConfig& cfg,
                                   const std::filesystem::path& out_root) {
    const Landscape landscape = cfg.make();
    const std::filesystem::path dir = out_root / cfg.run_id;
    std::filesystem::create_directories(dir);
    write_text_file((dir / "manifest").string(), serialize_config(resolved_config_file(cfg)));

    RunArtifacts artifacts;
    artifacts.run_id = cfg.run_id;
    artifacts.dir = dir;
    artifacts.config = cfg;
    try {
        if (const EsConfig* es = std::get_if<EsConfig>(&cfg.optimizer)) {
            artifacts.trajectory = es_run(landscape, cfg.start, *es);
        } else if (const FdConfig* fd = std::get_if<FdConfig>(&cfg.optimizer)) {
            artifacts.trajectory = fd_run(landscape, cfg.start, *fd);
        } else {
            artifacts.trajectory = ga_run(landscape, cfg.start, std::get<GaConfig>(cfg.optimizer));
        }
    } catch (const RunAbortedError& e) {
        write_text_file((dir / "trajectory.csv").string(),
                        trajectory_to_csv(e.partial_trajectory()));
        write_text_file((dir / "failure.txt").string(), std::string(e.what()) + "\n");
        throw;
    }

    if (cfg.outputs.contains("trajectory")) {
        write_text_file((dir / "trajectory.csv").string(),
                        trajectory_to_csv(artifacts.trajectory));
    }
    if (cfg.outputs.contains("grid")) {
        write_text_file((dir / "grid.csv").string(),
                        grid_to_csv(grid_sample(landscape, cfg.grid_resolution)));
    }
    if (cfg.outputs.contains("divergence")) {
        const double sigma = std::get<EsConfig>(cfg.optimizer).sigma;
        artifacts.divergence =
            divergence_curve(artifacts.trajectory, landscape, sigma, cfg.quadrature_nodes);
        write_text_file((dir / "divergence.csv").string(),
                        divergence_to_csv(*artifacts.divergence));
    }
    if (cfg.outputs.contains("robustness")) {
        const RobustnessParams& rp = *cfg.robustness;
        Objective objective = [&landscape](const ParamVector& p) {
            return landscape.evaluate(p);
        };
        artifacts.robustness = perturbation_cloud(
            objective, artifacts.final_record().iterate, rp.sigma, rp.count, rp.per_trials,
            rp.base_trials, derive_seed(cfg.seed, 0x726f62ULL));
        write_text_file((dir / "robustness.csv").string(),
                        robustness_to_csv(*artifacts.robustness));
        write_text_file((dir / "robustness_summary.txt").string(),
                        robustness_summary(*artifacts.robustness));
    }
    return artifacts;
}

inline RunArtifacts run_experiment_text(const std::string& config_text,
                                        const std::filesystem::path& out_root) {
    return run_experiment(parse_experiment_config(parse_config(config_text)), out_root);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepConfig {
    ConfigFile base;          // experiment config without the [sweep] section
    std::string axis;         // dotted path, e.g. optimizer.sigma
    std::vector<double> values;
};

inline SweepConfig parse_sweep_config(const ConfigFile& file) {
    const ConfigSection* sweep = file.find("sweep");
    if (sweep == nullptr) throw ConfigError("sweep", "missing section");
    SectionReader r(*sweep);
    SweepConfig cfg;
    cfg.axis = r.require_string("axis");
    cfg.values = r.get_doubles("values");
    r.reject_unknown();
    for (double v : cfg.values) {
        if (!std::isfinite(v)) throw ConfigError("sweep.values", "values must be finite");
    }
    cfg.base.sections.clear();
    for (const auto& section : file.sections) {
        if (section.name != "sweep") cfg.base.sections.push_back(section);
    }
    return cfg;
}

namespace detail {
inline std::string value_suffix(double v) {
    std::string s = format_number(v);
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
        if (c == '+') c = '_';
    }
    return s;
}
}  // namespace detail

struct SweepResult {
    std::vector<RunArtifacts> runs;          // successful runs, value order
    std::vector<std::string> failures;       // per-value failure notes ("" = ok)
    std::filesystem::path summary_path;
};

// One run per swept value. Sub-seeds derive from the base seed and the value
// itself, so permuting the value order leaves every run's artifacts
// unchanged. Per-run failures are recorded and the sweep continues.
inline SweepResult run_sweep(const SweepConfig& sweep, const std::filesystem::path& out_root) {
    // Validate the base against every value up front.
    const std::string base_run_id = [&] {
        const std::string* id = sweep.base.top().find("run_id");
        if (id == nullptr) throw ConfigError("run_id", "missing required key");
        return *id;
    }();
    const std::uint64_t base_seed = [&] {
        const std::string* s = sweep.base.top().find("seed");
        return s == nullptr ? std::uint64_t{0} : std::stoull(*s);
    }();
    std::vector<ExperimentConfig> configs;
    for (double value : sweep.values) {
        ConfigFile file = sweep.base;
        apply_override(file, sweep.axis + "=" + format_number(value));
        file.top().set("run_id", base_run_id + "_" + detail::value_suffix(value));
        file.top().set("seed",
                       std::to_string(derive_seed(base_seed, std::bit_cast<std::uint64_t>(value))));
        configs.push_back(parse_experiment_config(file));
    }

    SweepResult result;
    std::ostringstream summary;
    const std::size_t d = configs.front().start.size();
    summary << "value";
    for (std::size_t k = 0; k < d; ++k) summary << ",final_x" << k;
    summary << ",final_fitness,final_expected_fitness,status\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
        summary << format_number(sweep.values[i]);
        try {
            RunArtifacts artifacts = run_experiment(configs[i], out_root);
            const TrajectoryRecord& fin = artifacts.final_record();
            for (double x : fin.iterate) summary << "," << format_number(x);
            summary << "," << format_number(fin.fitness_at_iterate) << ",";
            if (fin.expected_fitness) summary << format_number(*fin.expected_fitness);
            summary << ",ok\n";
            result.runs.push_back(std::move(artifacts));
            result.failures.emplace_back();
        } catch (const std::exception& e) {
            for (std::size_t k = 0; k < d; ++k) summary << ",";
            summary << ",,failed\n";
            result.failures.emplace_back(e.what());
        }
    }
    result.summary_path = out_root / (base_run_id + "_sweep_summary.csv");
    write_text_file(result.summary_path.string(), summary.str());
    return result;
}

// ---------------------------------------------------------------------------
// Standalone robustness comparisons over explicit solutions
// ---------------------------------------------------------------------------

struct ComparisonConfig {
    std::string run_id;
    std::uint64_t seed = 0;
    std::string landscape_name;
    std::vector<std::pair<std::string, double>> landscape_params;
    std::vector<std::string> solution_names;
    std::vector<ParamVector> solutions;
    std::vector<double> sigmas;
    int count = 1000;
    int per_trials = 1;
    int base_trials = 1;
    Alternative alternative = Alternative::greater;
};

inline ComparisonConfig parse_comparison_config(const ConfigFile& file) {
    ComparisonConfig cfg;
    SectionReader top(file.top());
    cfg.run_id = top.require_string("run_id");
    cfg.seed = top.get_uint64("seed", std::uint64_t{0});
    top.reject_unknown();

    const ConfigSection* landscape_section = file.find("landscape");
    if (landscape_section == nullptr) throw ConfigError("landscape", "missing section");
    SectionReader land(*landscape_section);
    cfg.landscape_name = land.require_string("name");
    cfg.landscape_params = default_landscape_params(cfg.landscape_name);
    for (const auto& [k, v] : land.remaining()) {
        auto it = std::find_if(cfg.landscape_params.begin(), cfg.landscape_params.end(),
                               [&](const auto& kv) { return kv.first == k; });
        if (it == cfg.landscape_params.end()) {
            throw ConfigError("landscape." + k, "unknown parameter for landscape '" +
                                                    cfg.landscape_name + "'");
        }
        it->second = std::stod(v);
    }

    for (const ConfigSection* section : file.all("solution")) {
        if (section->arg.empty()) throw ConfigError("solution", "solution sections need a name");
        SectionReader sol(*section);
        cfg.solution_names.push_back(section->arg);
        cfg.solutions.push_back(sol.get_doubles("coords"));
        sol.reject_unknown();
    }
    if (cfg.solutions.size() < 2) {
        throw ConfigError("solution", "need at least 2 [solution <name>] sections");
    }

    const ConfigSection* rob = file.find("robustness");
    if (rob == nullptr) throw ConfigError("robustness", "missing section");
    SectionReader r(*rob);
    cfg.sigmas = r.get_doubles("sigmas");
    cfg.count = static_cast<int>(r.get_int("count", 1000));
    cfg.per_trials = static_cast<int>(r.get_int("per_trials", 1));
    cfg.base_trials = static_cast<int>(r.get_int("base_trials", 1));
    const std::string alt = r.get_string("alternative", "greater");
    if (alt == "greater") cfg.alternative = Alternative::greater;
    else if (alt == "less") cfg.alternative = Alternative::less;
    else if (alt == "two_sided") cfg.alternative = Alternative::two_sided;
    else throw ConfigError("robustness.alternative", "must be greater/less/two_sided");
    r.reject_unknown();

    for (const auto& section : file.sections) {
        if (section.name.empty() || section.name == "landscape" ||
            section.name == "solution" || section.name == "robustness") {
            continue;
        }
        throw ConfigError(section.name, "unknown section");
    }

    const Landscape landscape = make_landscape(cfg.landscape_name, cfg.landscape_params);
    for (std::size_t i = 0; i < cfg.solutions.size(); ++i) {
        if (static_cast<int>(cfg.solutions[i].size()) != landscape.dim()) {
            throw ConfigError("solution " + cfg.solution_names[i] + ".coords",
                              "dimension does not match landscape dimension");
        }
    }
    return cfg;
}

// Runs the comparison and writes per-(solution, sigma) cloud CSVs and
// summaries plus a pairwise test summary into <out_root>/<run_id>/.
inline ComparisonTable run_comparison(const ComparisonConfig& cfg,
                                      const std::filesystem::path& out_root) {
    const Landscape landscape = make_landscape(cfg.landscape_name, cfg.landscape_params);
    Objective objective = [&landscape](const ParamVector& p) { return landscape.evaluate(p); };
    ComparisonTable table =
        compare_solutions(objective, cfg.solution_names, cfg.solutions, cfg.sigmas, cfg.count,
                          cfg.per_trials, cfg.base_trials, cfg.seed, cfg.alternative);
    const std::filesystem::path dir = out_root / cfg.run_id;
    std::filesystem::create_directories(dir);
    std::ostringstream summary;
    summary << "solution_a,solution_b,sigma,u_statistic,p_value\n";
    for (std::size_t s = 0; s < cfg.sigmas.size(); ++s) {
        for (std::size_t i = 0; i < cfg.solutions.size(); ++i) {
            const std::string stem =
                cfg.solution_names[i] + "_sigma" + detail::value_suffix(cfg.sigmas[s]);
            write_text_file((dir / (stem + "_robustness.csv")).string(),
                            robustness_to_csv(table.reports[i][s]));
            write_text_file((dir / (stem + "_robustness_summary.txt")).string(),
                            robustness_summary(table.reports[i][s]));
            for (std::size_t j = 0; j < cfg.solutions.size(); ++j) {
                if (i == j) continue;
                const MannWhitneyResult& mw = table.pairwise[s][i][j];
                summary << cfg.solution_names[i] << "," << cfg.solution_names[j] << ","
                        << format_number(cfg.sigmas[s]) << "," << format_number(mw.u_statistic)
                        << "," << format_number(mw.p_value) << "\n";
            }
        }
    }
    write_text_file((dir / "pairwise_tests.csv").string(), summary.str());
    return table;
}

}  // namespace eslab
