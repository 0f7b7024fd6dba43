#include <catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <filesystem>

#include "eslab/harness.hpp"
#include "eslab/suite.hpp"

using namespace eslab;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"(run_id small_donut
seed 42
outputs trajectory,divergence
start 0.15 0.5
quadrature_nodes 21

[landscape]
name donut

[optimizer]
type es
sigma 0.16
population 16
learning_rate 0.01
mirrored true
rank_shaping false
iterations 20
)";

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("eslab_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing") {
    SECTION("round trip preserves sections and entries") {
        ConfigFile file = parse_config(kSmallConfig);
        ConfigFile again = parse_config(serialize_config(file));
        REQUIRE(again.sections.size() == file.sections.size());
        for (std::size_t i = 0; i < file.sections.size(); ++i) {
            CHECK(again.sections[i].name == file.sections[i].name);
            CHECK(again.sections[i].entries == file.sections[i].entries);
        }
    }
    SECTION("comments and blank lines are ignored") {
        ConfigFile file = parse_config("# header\n\nkey value\n  # indented comment\n");
        REQUIRE(file.top().entries.size() == 1);
        CHECK(*file.top().find("key") == "value");
    }
    SECTION("duplicate keys are rejected with the qualified name") {
        try {
            parse_config("[optimizer]\nsigma 1\nsigma 2\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "optimizer.sigma");
        }
    }
    SECTION("dotted overrides reach nested sections") {
        ConfigFile file = parse_config(kSmallConfig);
        apply_override(file, "optimizer.sigma=0.04");
        apply_override(file, "seed=9");
        CHECK(*file.find("optimizer")->find("sigma") == "0.04");
        CHECK(*file.top().find("seed") == "9");
    }
}

TEST_CASE("experiment config validation") {
    auto parse_text = [](const std::string& text) {
        return parse_experiment_config(parse_config(text));
    };
    SECTION("the small config validates") {
        ExperimentConfig cfg = parse_text(kSmallConfig);
        CHECK(cfg.run_id == "small_donut");
        CHECK(cfg.seed == 42);
        CHECK(std::get<EsConfig>(cfg.optimizer).sigma == 0.16);
    }
    SECTION("start dimension mismatch names the start field") {
        ConfigFile file = parse_config(kSmallConfig);
        file.top().set("start", "0.1 0.2 0.3");
        try {
            parse_experiment_config(file);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "start");
        }
    }
    SECTION("unknown optimizer keys are rejected by name") {
        ConfigFile file = parse_config(kSmallConfig);
        file.get_or_create("optimizer").set("temperature", "1.0");
        try {
            parse_experiment_config(file);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "optimizer.temperature");
        }
    }
    SECTION("unknown landscape parameters are rejected by name") {
        ConfigFile file = parse_config(kSmallConfig);
        file.get_or_create("landscape").set("radius", "0.2");
        try {
            parse_experiment_config(file);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "landscape.radius");
        }
    }
    SECTION("divergence output requires an ES optimizer") {
        ConfigFile file = parse_config(kSmallConfig);
        ConfigSection& opt = file.get_or_create("optimizer");
        opt.entries.clear();
        opt.set("type", "fd");
        opt.set("learning_rate", "0.01");
        opt.set("iterations", "10");
        try {
            parse_experiment_config(file);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "outputs");
        }
    }
    SECTION("all shipped configs parse and validate") {
        for (const auto& [name, text] : shipped::configs()) {
            if (name == "robustness_example") {
                CHECK_NOTHROW(parse_comparison_config(parse_config(text)));
            } else if (name == "donut_sigma_sweep") {
                CHECK_NOTHROW(parse_sweep_config(parse_config(text)));
            } else {
                ExperimentConfig cfg = parse_experiment_config(parse_config(text));
                CHECK(cfg.run_id == name);
            }
        }
    }
}

TEST_CASE("run experiment artifacts") {
    const fs::path dir = fresh_dir("run");
    const ExperimentConfig cfg = parse_experiment_config(parse_config(kSmallConfig));
    const RunArtifacts artifacts = run_experiment(cfg, dir);
    SECTION("expected files exist") {
        CHECK(fs::exists(artifacts.dir / "manifest"));
        CHECK(fs::exists(artifacts.dir / "trajectory.csv"));
        CHECK(fs::exists(artifacts.dir / "divergence.csv"));
        CHECK_FALSE(fs::exists(artifacts.dir / "grid.csv"));
    }
    SECTION("trajectory CSV has the documented header") {
        const std::string csv = read_text_file((artifacts.dir / "trajectory.csv").string());
        CHECK(csv.starts_with(
            "iteration,x0,x1,fitness_at_iterate,expected_fitness,grad_norm,evaluations_used\n"));
    }
    SECTION("rerunning from the manifest reproduces every CSV byte for byte") {
        const std::string manifest = read_text_file((artifacts.dir / "manifest").string());
        const fs::path dir2 = fresh_dir("rerun");
        const RunArtifacts again = run_experiment_text(manifest, dir2);
        for (const char* file : {"manifest", "trajectory.csv", "divergence.csv"}) {
            CHECK(read_text_file((artifacts.dir / file).string()) ==
                  read_text_file((again.dir / file).string()));
        }
    }
    SECTION("grid output is produced on request") {
        ConfigFile file = parse_config(kSmallConfig);
        file.top().set("outputs", "trajectory,grid");
        file.top().set("grid_resolution", "16");
        file.top().set("run_id", "small_donut_grid");
        const RunArtifacts with_grid = run_experiment(parse_experiment_config(file), dir);
        const std::string csv = read_text_file((with_grid.dir / "grid.csv").string());
        CHECK(csv.starts_with("x,y,fitness\n"));
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 16 * 16);
    }
}

TEST_CASE("sweeps") {
    const std::string sweep_text = std::string(kSmallConfig) +
                                   "\n[sweep]\naxis optimizer.sigma\nvalues 0.16 0.04\n";
    SECTION("permuting the value order leaves each run's artifacts unchanged") {
        SweepConfig fwd = parse_sweep_config(parse_config(sweep_text));
        SweepConfig rev = fwd;
        std::reverse(rev.values.begin(), rev.values.end());
        const fs::path dir_a = fresh_dir("sweep_a");
        const fs::path dir_b = fresh_dir("sweep_b");
        run_sweep(fwd, dir_a);
        run_sweep(rev, dir_b);
        for (const char* run : {"small_donut_0p16", "small_donut_0p04"}) {
            CHECK(read_text_file((dir_a / run / "trajectory.csv").string()) ==
                  read_text_file((dir_b / run / "trajectory.csv").string()));
        }
    }
    SECTION("a single-value sweep equals the equivalent single run") {
        SweepConfig sweep = parse_sweep_config(parse_config(sweep_text));
        sweep.values = {0.04};
        const fs::path dir_a = fresh_dir("sweep_single");
        SweepResult result = run_sweep(sweep, dir_a);
        REQUIRE(result.runs.size() == 1);

        ConfigFile single = parse_config(kSmallConfig);
        apply_override(single, "optimizer.sigma=" + format_number(0.04));
        single.top().set("run_id", "small_donut_0p04");
        single.top().set("seed",
                         std::to_string(derive_seed(42, std::bit_cast<std::uint64_t>(0.04))));
        const fs::path dir_b = fresh_dir("single_run");
        RunArtifacts direct = run_experiment(parse_experiment_config(single), dir_b);
        CHECK(read_text_file((result.runs[0].dir / "trajectory.csv").string()) ==
              read_text_file((direct.dir / "trajectory.csv").string()));
    }
    SECTION("invalid swept values fail validation before any run starts") {
        SweepConfig sweep = parse_sweep_config(parse_config(sweep_text));
        sweep.values = {-1.0, 0.16};  // negative sigma is rejected up front
        const fs::path dir = fresh_dir("sweep_fail");
        CHECK_THROWS_AS(run_sweep(sweep, dir), ConfigError);
    }
}

TEST_CASE("figure suite: gradient cliff") {
    const fs::path dir = fresh_dir("suite_cliff");
    const SuiteResult result = run_figure_suite("gradient_cliff", dir);
    CHECK(result.all_passed());
    CHECK(fs::exists(result.dir / "checklist.txt"));
    const std::string checklist = read_text_file((result.dir / "checklist.txt").string());
    CHECK(checklist.find("FAIL") == std::string::npos);
    for (const auto& line : result.lines) {
        CHECK(line.criterion.starts_with("criterion "));
    }
    SECTION("unknown suite names are rejected") {
        CHECK_THROWS_AS(run_figure_suite("volcano", dir), ConfigError);
    }
}
