#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr, interleaved
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("eslab_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path log = workdir / "cli_output.txt";
    const std::string command = std::string(ESLAB_CLI_PATH) + " " + args + " > " +
                                log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    CliResult result;
#ifdef _WIN32
    result.exit_code = status;
#else
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
    result.output = read_file(log);
    return result;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

const char* kSmallConfig = R"(run_id cli_donut
seed 5
outputs trajectory
start 0.15 0.5

[landscape]
name donut

[optimizer]
type es
sigma 0.16
population 16
learning_rate 0.01
iterations 15
)";

}  // namespace

TEST_CASE("cli list-landscapes") {
    const fs::path dir = fresh_dir("list");
    const CliResult r = run_cli("list-landscapes", dir);
    CHECK(r.exit_code == 0);
    for (const char* name : {"donut", "narrowing_path", "fleeting_peaks", "gradient_gap",
                             "gradient_cliff"}) {
        CHECK(r.output.find(name) != std::string::npos);
    }
    CHECK(r.output.find("hole_radius") != std::string::npos);
}

TEST_CASE("cli run") {
    const fs::path dir = fresh_dir("run");
    const fs::path cfg = write_config(dir, "donut.cfg", kSmallConfig);
    SECTION("a valid config runs to completion and writes artifacts") {
        const CliResult r =
            run_cli("run --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
        CHECK(r.exit_code == 0);
        CHECK(fs::exists(dir / "out" / "cli_donut" / "manifest"));
        CHECK(fs::exists(dir / "out" / "cli_donut" / "trajectory.csv"));
    }
    SECTION("repeating the identical invocation reproduces the artifacts byte for byte") {
        run_cli("run --config " + cfg.string() + " --out " + (dir / "a").string(), dir);
        run_cli("run --config " + cfg.string() + " --out " + (dir / "b").string(), dir);
        CHECK(read_file(dir / "a" / "cli_donut" / "trajectory.csv") ==
              read_file(dir / "b" / "cli_donut" / "trajectory.csv"));
        CHECK(read_file(dir / "a" / "cli_donut" / "manifest") ==
              read_file(dir / "b" / "cli_donut" / "manifest"));
    }
    SECTION("--set overrides change the run, --seed changes the stream") {
        const CliResult r = run_cli("run --config " + cfg.string() +
                                        " --set optimizer.iterations=3 --seed 99 --out " +
                                        (dir / "ovr").string(),
                                    dir);
        CHECK(r.exit_code == 0);
        const std::string manifest = read_file(dir / "ovr" / "cli_donut" / "manifest");
        CHECK(manifest.find("iterations 3") != std::string::npos);
        CHECK(manifest.find("seed 99") != std::string::npos);
    }
    SECTION("a bad start dimension exits 1 and the message names the field") {
        const fs::path bad = write_config(
            dir, "bad.cfg",
            std::string(kSmallConfig).replace(std::string(kSmallConfig).find("start 0.15 0.5"),
                                              14, "start 0.15"));
        const CliResult r =
            run_cli("run --config " + bad.string() + " --out " + (dir / "bad").string(), dir);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("start") != std::string::npos);
    }
    SECTION("an unknown key exits 1 and the message names the key") {
        const fs::path bad =
            write_config(dir, "unknown.cfg", std::string(kSmallConfig) + "wobble 3\n");
        const CliResult r =
            run_cli("run --config " + bad.string() + " --out " + (dir / "unk").string(), dir);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("wobble") != std::string::npos);
    }
    SECTION("a missing config file exits 2") {
        const CliResult r = run_cli("run --config " + (dir / "nope.cfg").string(), dir);
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("cli sweep") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg = write_config(
        dir, "sweep.cfg",
        std::string(kSmallConfig) + "\n[sweep]\naxis optimizer.sigma\nvalues 0.16 0.04\n");
    const CliResult r =
        run_cli("sweep --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "cli_donut_sweep_summary.csv"));
    CHECK(fs::exists(dir / "out" / "cli_donut_0p16" / "trajectory.csv"));
    CHECK(fs::exists(dir / "out" / "cli_donut_0p04" / "trajectory.csv"));
}

TEST_CASE("cli suite") {
    const fs::path dir = fresh_dir("suite");
    SECTION("gradient_cliff passes its checklist and exits 0") {
        const CliResult r =
            run_cli("suite gradient_cliff --out " + (dir / "out").string(), dir);
        CHECK(r.exit_code == 0);
        CHECK(fs::exists(dir / "out" / "gradient_cliff" / "checklist.txt"));
        CHECK(r.output.find("PASS") != std::string::npos);
    }
    SECTION("an unknown suite exits 1") {
        const CliResult r = run_cli("suite volcano --out " + (dir / "out").string(), dir);
        CHECK(r.exit_code == 1);
    }
}

TEST_CASE("cli grid") {
    const fs::path dir = fresh_dir("grid");
    const CliResult r = run_cli(
        "grid donut --resolution 16 --out " + (dir / "out").string(), dir);
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(dir / "out" / "donut_grid.csv");
    CHECK(csv.starts_with("x,y,fitness\n"));
}

TEST_CASE("cli robustness") {
    const fs::path dir = fresh_dir("rob");
    const fs::path cfg = write_config(dir, "rob.cfg", R"(run_id cli_rob
seed 3

[landscape]
name donut

[solution center]
coords 0.5 0.5

[solution ring]
coords 0.4 0.5

[robustness]
sigmas 0.16
count 50
)");
    const CliResult r =
        run_cli("robustness --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "cli_rob" / "pairwise_tests.csv"));
    CHECK(fs::exists(dir / "out" / "cli_rob" / "center_sigma0p16_robustness.csv"));
}

TEST_CASE("cli argument errors") {
    const fs::path dir = fresh_dir("args");
    SECTION("an unknown subcommand exits 1") {
        CHECK(run_cli("frobnicate", dir).exit_code == 1);
    }
    SECTION("run without --config exits 1") {
        CHECK(run_cli("run", dir).exit_code == 1);
    }
    SECTION("--help exits 0") {
        CHECK(run_cli("--help", dir).exit_code == 0);
    }
}
