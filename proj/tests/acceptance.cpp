// Acceptance runner: executes one numbered behavioral criterion (or all of
// them) against the shipped configs and prints one PASS/FAIL line per
// criterion. Exit code 0 iff every selected criterion passes.
//
// Two lines are documented-red with the shipped setups:
//   - criterion 1's "strictly increasing distance" clause (the sigma=0.04
//     optimum of the smoothed Donut sits further from the ring than the
//     sigma=0.002 one, so the middle point breaks the ordering), and
//   - criterion 9's Donut robustness_score / Mann-Whitney clauses (both
//     trained solutions land where the base fitness is exactly 0, making the
//     ratio undefined, and the perturbation clouds overlap too much for
//     p < 0.01).
// They are reported honestly rather than tuned around.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eslab/csv.hpp"
#include "eslab/harness.hpp"
#include "eslab/suite.hpp"

using namespace eslab;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
    bool passed = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& note) {
        passed = passed && ok;
        notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + note);
    }
};

fs::path scratch_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("eslab_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Collects the checklist lines of a suite that map to one criterion tag.
void absorb_suite_lines(CriterionResult& result, const SuiteResult& suite,
                        const std::string& criterion) {
    for (const auto& line : suite.lines) {
        if (line.criterion == criterion) result.check(line.passed, line.text);
    }
}

CriterionResult criterion_1() {
    CriterionResult result;
    absorb_suite_lines(result, run_figure_suite("donut", scratch_dir("c1")), "criterion 1");
    return result;
}

CriterionResult criterion_2() {
    CriterionResult result;
    absorb_suite_lines(result, run_figure_suite("donut", scratch_dir("c2_donut")),
                       "criterion 2");
    absorb_suite_lines(result, run_figure_suite("gradient_gap", scratch_dir("c2_gap")),
                       "criterion 2");
    return result;
}

CriterionResult criterion_3() {
    CriterionResult result;
    absorb_suite_lines(result, run_figure_suite("narrowing_path", scratch_dir("c3")),
                       "criterion 3");
    return result;
}

CriterionResult criterion_4() {
    CriterionResult result;
    absorb_suite_lines(result, run_figure_suite("fleeting_peaks", scratch_dir("c4")),
                       "criterion 4");
    return result;
}

CriterionResult criterion_5() {
    CriterionResult result;
    absorb_suite_lines(result, run_figure_suite("gradient_gap", scratch_dir("c5_gap")),
                       "criterion 5");
    absorb_suite_lines(result, run_figure_suite("gradient_cliff", scratch_dir("c5_cliff")),
                       "criterion 5");
    return result;
}

CriterionResult criterion_6() {
    CriterionResult result;
    // f(z) = z^T A z + b^T z + c with fixed coefficients; the estimator's
    // expectation at mean m is exactly 2*A*m + b for any sigma.
    const double a00 = -1.0, a01 = 0.3, a11 = -0.5;
    const ParamVector b = {0.2, -0.1};
    const double c = 0.7;
    const Landscape quad("quadratic", 2, {{-10.0, 10.0}, {-10.0, 10.0}}, {},
                         [=](const ParamVector& z) {
                             return a00 * z[0] * z[0] + 2.0 * a01 * z[0] * z[1] +
                                    a11 * z[1] * z[1] + b[0] * z[0] + b[1] * z[1] + c;
                         });
    const SearchDistribution dist{{0.3, 0.6}, 0.1};
    const ParamVector expected = {2.0 * (a00 * dist.mean[0] + a01 * dist.mean[1]) + b[0],
                                  2.0 * (a01 * dist.mean[0] + a11 * dist.mean[1]) + b[1]};
    const int trials = 10000;
    GaussianStream rng(606);
    std::vector<double> sum(2, 0.0), sum_sq(2, 0.0);
    for (int t = 0; t < trials; ++t) {
        const auto est = es_gradient_estimate(quad, dist, 16, true, false, rng);
        for (int k = 0; k < 2; ++k) {
            sum[k] += est.gradient[k];
            sum_sq[k] += est.gradient[k] * est.gradient[k];
        }
    }
    for (int k = 0; k < 2; ++k) {
        const double mean = sum[k] / trials;
        const double var = (sum_sq[k] - trials * mean * mean) / (trials - 1);
        const double se = std::sqrt(var / trials);
        std::ostringstream note;
        note << "component " << k << ": mean estimate " << format_number(mean)
             << " vs analytic " << format_number(expected[k]) << " (|diff| "
             << format_number(std::abs(mean - expected[k])) << " <= 3*SE "
             << format_number(3.0 * se) << ")";
        result.check(std::abs(mean - expected[k]) <= 3.0 * se, note.str());
    }
    // Mirrored sampling on a constant landscape cancels exactly, not just in
    // expectation.
    const Landscape flat("flat", 2, {{0.0, 1.0}, {0.0, 1.0}}, {},
                         [](const ParamVector&) { return 3.25; });
    bool exact = true;
    for (int t = 0; t < 100; ++t) {
        const auto est = es_gradient_estimate(flat, dist, 16, true, false, rng);
        exact = exact && est.gradient[0] == 0.0 && est.gradient[1] == 0.0;
    }
    result.check(exact, "mirrored estimate on a constant landscape is exactly zero");
    return result;
}

CriterionResult criterion_7() {
    CriterionResult result;
    // Representative in-bounds points, one per default landscape, away from
    // axis-aligned discontinuities so the tensor quadrature has converged.
    const std::vector<std::pair<std::string, ParamVector>> points = {
        {"donut", {0.1, 0.1}},
        {"narrowing_path", {0.1, 0.45}},
        {"fleeting_peaks", {0.05, 0.5}},
        {"gradient_gap", {0.1, 0.5}},
        {"gradient_cliff", {0.1, 0.5}},
    };
    int pair_index = 0;
    for (const auto& [name, mean] : points) {
        const Landscape landscape = make_landscape(name);
        for (double sigma : {0.002, 0.04, 0.16}) {
            const double quad = expected_fitness_quadrature(landscape, mean, sigma, 41).value;
            GaussianStream rng(derive_seed(707, static_cast<std::uint64_t>(pair_index++)));
            const auto mc = expected_fitness_mc(landscape, mean, sigma, 100000, rng);
            const double tolerance = 4.0 * std::max(mc.standard_error, 1e-12);
            std::ostringstream note;
            note << name << " sigma=" << format_number(sigma) << ": |MC - quadrature| "
                 << format_number(std::abs(mc.value - quad)) << " <= 4*SE "
                 << format_number(tolerance);
            result.check(std::abs(mc.value - quad) <= tolerance, note.str());
        }
    }
    // Closed-form cases.
    const Landscape flat("flat", 2, {{0.0, 1.0}, {0.0, 1.0}}, {},
                         [](const ParamVector&) { return 2.5; });
    const Landscape lin("linear", 2, {{0.0, 1.0}, {0.0, 1.0}}, {},
                        [](const ParamVector& z) { return 2.0 * z[0] - z[1] + 0.5; });
    const double fq = expected_fitness_quadrature(flat, {0.3, 0.3}, 0.2, 41).value;
    result.check(std::abs(fq - 2.5) <= 1e-12, "constant landscape matches to 1e-12");
    const double lq = expected_fitness_quadrature(lin, {0.4, 0.9}, 0.2, 41).value;
    result.check(std::abs(lq - (2.0 * 0.4 - 0.9 + 0.5)) <= 1e-12,
                 "linear landscape matches to 1e-12");
    return result;
}

// Independent oracle for criterion 8, written only in terms of the U
// definition and brute-force relabeling enumeration.
double oracle_u(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a) {
        for (double y : b) {
            if (x > y) u += 1.0;
            else if (x == y) u += 0.5;
        }
    }
    return u;
}

void oracle_enumerate(const std::vector<double>& pooled, std::size_t next, std::size_t left,
                      std::vector<double>& chosen, std::vector<double>& rest,
                      std::vector<double>& out) {
    if (left == 0) {
        std::vector<double> b = rest;
        b.insert(b.end(), pooled.begin() + next, pooled.end());
        out.push_back(oracle_u(chosen, b));
        return;
    }
    if (pooled.size() - next < left) return;
    chosen.push_back(pooled[next]);
    oracle_enumerate(pooled, next + 1, left - 1, chosen, rest, out);
    chosen.pop_back();
    rest.push_back(pooled[next]);
    oracle_enumerate(pooled, next + 1, left, chosen, rest, out);
    rest.pop_back();
}

double oracle_exact_p(const std::vector<double>& a, const std::vector<double>& b,
                      Alternative alternative) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> us;
    std::vector<double> chosen, rest;
    oracle_enumerate(pooled, 0, a.size(), chosen, rest, us);
    const double u_obs = oracle_u(a, b);
    const double mu = 0.5 * static_cast<double>(a.size()) * static_cast<double>(b.size());
    long long hits = 0;
    for (double u : us) {
        bool hit = false;
        switch (alternative) {
            case Alternative::greater: hit = u >= u_obs - 1e-9; break;
            case Alternative::less: hit = u <= u_obs + 1e-9; break;
            case Alternative::two_sided:
                hit = std::abs(u - mu) >= std::abs(u_obs - mu) - 1e-9;
                break;
        }
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(us.size());
}

CriterionResult criterion_8() {
    CriterionResult result;
    std::mt19937_64 gen(808);
    std::uniform_int_distribution<int> size(1, 8), value(0, 4);
    const Alternative alts[] = {Alternative::two_sided, Alternative::greater,
                                Alternative::less};
    int mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(size(gen)), b(size(gen));
        for (double& v : a) v = value(gen);
        for (double& v : b) v = value(gen);
        const Alternative alt = alts[trial % 3];
        const MannWhitneyResult r = mann_whitney_u(a, b, alt);
        const bool u_ok = std::abs(r.u_statistic - oracle_u(a, b)) <= 1e-9;
        const bool p_ok =
            r.degenerate || std::abs(r.p_value - oracle_exact_p(a, b, alt)) <= 1e-9;
        if (!(u_ok && p_ok)) ++mismatches;
    }
    result.check(mismatches == 0,
                 "implementation equals the enumeration oracle on 100 random instances "
                 "with n_a, n_b <= 8 (" + std::to_string(mismatches) + " mismatches)");
    const MannWhitneyResult sep = mann_whitney_u({1, 2, 3}, {4, 5, 6}, Alternative::less);
    result.check(std::abs(sep.p_value - 0.05) <= 1e-12,
                 "{1,2,3} vs {4,5,6} one-sided exact p = 0.05 (p=" +
                     format_number(sep.p_value) + ")");
    return result;
}

CriterionResult criterion_9() {
    CriterionResult result;
    absorb_suite_lines(result,
                       run_figure_suite("robustness_comparison", scratch_dir("c9")),
                       "criterion 9");
    return result;
}

CriterionResult criterion_10() {
    CriterionResult result;
    const fs::path a = scratch_dir("c10_a");
    const fs::path b = scratch_dir("c10_b");
    run_figure_suite("gradient_cliff", a);
    run_figure_suite("gradient_cliff", b);
    int files = 0;
    bool identical = true;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".csv") continue;
        ++files;
        const fs::path twin = b / fs::relative(entry.path(), a);
        if (!fs::exists(twin) ||
            read_text_file(entry.path().string()) != read_text_file(twin.string())) {
            identical = false;
            result.notes.push_back("FAILED: mismatch at " + entry.path().string());
        }
    }
    result.check(files > 0 && identical,
                 "gradient_cliff suite rerun reproduces all " + std::to_string(files) +
                     " CSV artifacts byte for byte");
    return result;
}

using CriterionFn = std::function<CriterionResult()>;

const std::vector<CriterionFn>& criteria() {
    static const std::vector<CriterionFn> fns = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    return fns;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    if (argc <= 1) {
        for (int i = 1; i <= 10; ++i) selected.push_back(i);
    } else {
        for (int i = 1; i < argc; ++i) {
            const int n = std::atoi(argv[i]);
            if (n < 1 || n > 10) {
                std::cerr << "usage: acceptance [criterion 1..10]...\n";
                return 2;
            }
            selected.push_back(n);
        }
    }

    bool all_passed = true;
    for (int n : selected) {
        CriterionResult result;
        try {
            result = criteria()[static_cast<std::size_t>(n - 1)]();
        } catch (const std::exception& e) {
            result.passed = false;
            result.notes.push_back(std::string("FAILED: exception: ") + e.what());
        }
        std::cout << "CRITERION " << n << ": " << (result.passed ? "PASS" : "FAIL") << "\n";
        for (const auto& note : result.notes) std::cout << "  " << note << "\n";
        all_passed = all_passed && result.passed;
    }
    return all_passed ? 0 : 1;
}
