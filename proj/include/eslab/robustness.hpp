#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "eslab/core.hpp"
#include "eslab/rng.hpp"

namespace eslab {

using Objective = std::function<double(const ParamVector&)>;

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct RobustnessReport {
    double base_performance = 0.0;  // mean over base_trials
    std::vector<double> perturbed_performances;
    double perturbation_sigma = 0.0;
    double robustness_score = 0.0;  // median perturbed / base
    bool score_undefined = false;   // base_performance == 0
    Quartiles quartiles;
    std::uint64_t seed = 0;
};

namespace detail {

// Type-7 (linear interpolation) quantile of a sorted copy of the data.
inline double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace detail

// Evaluates `count` Gaussian perturbations of a solution, each averaged over
// per_trials objective calls, and the unperturbed solution averaged over
// base_trials calls. The robustness score is the perturbation cloud's median
// divided by the base performance; a zero base leaves the score undefined.
inline RobustnessReport perturbation_cloud(const Objective& objective,
                                           const ParamVector& solution, double sigma,
                                           int count, int per_trials, int base_trials,
                                           std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("perturbation_cloud: count must be >= 1");
    if (per_trials < 1) throw std::invalid_argument("perturbation_cloud: per_trials must be >= 1");
    if (base_trials < 1) throw std::invalid_argument("perturbation_cloud: base_trials must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("perturbation_cloud: sigma must be > 0");

    GaussianStream rng(seed);
    RobustnessReport report;
    report.perturbation_sigma = sigma;
    report.seed = seed;

    double base_sum = 0.0;
    for (int t = 0; t < base_trials; ++t) base_sum += objective(solution);
    report.base_performance = base_sum / base_trials;

    const std::size_t d = solution.size();
    ParamVector noise(d), perturbed(d);
    report.perturbed_performances.reserve(count);
    for (int i = 0; i < count; ++i) {
        rng.normal_vector(d, noise);
        for (std::size_t k = 0; k < d; ++k) perturbed[k] = solution[k] + sigma * noise[k];
        double sum = 0.0;
        for (int t = 0; t < per_trials; ++t) sum += objective(perturbed);
        report.perturbed_performances.push_back(sum / per_trials);
    }

    report.quartiles.q1 = detail::quantile(report.perturbed_performances, 0.25);
    report.quartiles.median = detail::quantile(report.perturbed_performances, 0.5);
    report.quartiles.q3 = detail::quantile(report.perturbed_performances, 0.75);
    if (report.base_performance != 0.0) {
        report.robustness_score = report.quartiles.median / report.base_performance;
    } else {
        report.score_undefined = true;
        report.robustness_score = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

enum class Alternative { two_sided, greater, less };
enum class MwMethod { automatic, exact, normal_approximation };

struct MannWhitneyResult {
    double u_statistic = 0.0;  // U of sample a
    double p_value = 1.0;
    int n_a = 0;
    int n_b = 0;
    Alternative alternative = Alternative::two_sided;
    MwMethod method_used = MwMethod::normal_approximation;
    bool degenerate = false;  // all pooled values identical
};

namespace detail {

// Midranks (1-based) of the pooled sample.
inline std::vector<double> midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
        i = j + 1;
    }
    return ranks;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace detail

// Mann-Whitney U rank-sum test with midrank tie handling. For
// n_a, n_b <= 8 the automatic method enumerates all rank assignments
// exactly; otherwise it uses the normal approximation with tie-corrected
// variance and continuity correction.
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& sample_a,
                                        const std::vector<double>& sample_b,
                                        Alternative alternative,
                                        MwMethod method = MwMethod::automatic) {
    if (sample_a.empty() || sample_b.empty()) {
        throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
    }
    const int n_a = static_cast<int>(sample_a.size());
    const int n_b = static_cast<int>(sample_b.size());
    const int n = n_a + n_b;
    std::vector<double> pooled = sample_a;
    pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
    const std::vector<double> ranks = detail::midranks(pooled);

    double rank_sum_a = 0.0;
    for (int i = 0; i < n_a; ++i) rank_sum_a += ranks[i];
    const double u_a = rank_sum_a - 0.5 * n_a * (n_a + 1);
    const double mu = 0.5 * static_cast<double>(n_a) * n_b;

    MannWhitneyResult result;
    result.u_statistic = u_a;
    result.n_a = n_a;
    result.n_b = n_b;
    result.alternative = alternative;

    const bool all_equal =
        std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; });
    if (all_equal) {
        result.degenerate = true;
        result.p_value = 1.0;
        result.method_used =
            (method == MwMethod::normal_approximation || (method == MwMethod::automatic &&
                                                          (n_a > 8 || n_b > 8)))
                ? MwMethod::normal_approximation
                : MwMethod::exact;
        return result;
    }

    const bool exact = (method == MwMethod::exact) ||
                       (method == MwMethod::automatic && n_a <= 8 && n_b <= 8);
    if (exact) {
        // Enumerate every assignment of n_a pooled positions to sample a.
        std::vector<bool> pick(static_cast<std::size_t>(n), false);
        std::fill(pick.begin(), pick.begin() + n_a, true);
        long long total = 0, hits = 0;
        const double tol = 1e-9;
        do {
            double rsum = 0.0;
            for (int i = 0; i < n; ++i) {
                if (pick[i]) rsum += ranks[i];
            }
            const double u = rsum - 0.5 * n_a * (n_a + 1);
            ++total;
            bool hit = false;
            switch (alternative) {
                case Alternative::greater: hit = u >= u_a - tol; break;
                case Alternative::less: hit = u <= u_a + tol; break;
                case Alternative::two_sided:
                    hit = std::abs(u - mu) >= std::abs(u_a - mu) - tol;
                    break;
            }
            if (hit) ++hits;
        } while (std::prev_permutation(pick.begin(), pick.end()));
        result.p_value = static_cast<double>(hits) / static_cast<double>(total);
        result.method_used = MwMethod::exact;
        return result;
    }

    // Tie-corrected variance.
    double tie_term = 0.0;
    {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = (static_cast<double>(n_a) * n_b / 12.0) *
                       (static_cast<double>(n) + 1.0 -
                        tie_term / (static_cast<double>(n) * (n - 1)));
    const double sd = std::sqrt(var);
    double p = 1.0;
    if (sd > 0.0) {
        switch (alternative) {
            case Alternative::greater:
                p = 1.0 - detail::normal_cdf((u_a - mu - 0.5) / sd);
                break;
            case Alternative::less:
                p = detail::normal_cdf((u_a - mu + 0.5) / sd);
                break;
            case Alternative::two_sided: {
                const double z = (std::abs(u_a - mu) - 0.5) / sd;
                p = std::min(1.0, 2.0 * (1.0 - detail::normal_cdf(std::max(0.0, z))));
                break;
            }
        }
    }
    result.p_value = std::clamp(p, 0.0, 1.0);
    result.method_used = MwMethod::normal_approximation;
    return result;
}

struct ComparisonTable {
    std::vector<std::string> solution_names;
    std::vector<double> sigmas;
    // reports[solution][sigma]
    std::vector<std::vector<RobustnessReport>> reports;
    // pairwise[sigma][i][j]: test of solution i's cloud vs solution j's cloud
    // (i != j) under the requested alternative.
    std::vector<std::vector<std::vector<MannWhitneyResult>>> pairwise;
    // base_match[i][j]: true when base performances are within 5% of each
    // other (|a-b| <= 0.05*max(|a|,|b|)); informational, mirrors the
    // like-for-like fitness-matching intent.
    std::vector<std::vector<bool>> base_match;
};

// Full cross product of perturbation clouds over solutions x sigmas with a
// shared seed schedule: the sub-seed for (solution i, sigma s) depends only
// on the base seed and the two indices.
inline ComparisonTable compare_solutions(const Objective& objective,
                                         const std::vector<std::string>& names,
                                         const std::vector<ParamVector>& solutions,
                                         const std::vector<double>& sigmas, int count,
                                         int per_trials, int base_trials, std::uint64_t seed,
                                         Alternative alternative = Alternative::greater) {
    if (solutions.size() < 2) {
        throw std::invalid_argument("compare_solutions: need at least 2 solutions");
    }
    if (names.size() != solutions.size()) {
        throw std::invalid_argument("compare_solutions: names/solutions size mismatch");
    }
    if (sigmas.empty()) throw std::invalid_argument("compare_solutions: need at least 1 sigma");

    ComparisonTable table;
    table.solution_names = names;
    table.sigmas = sigmas;
    table.reports.resize(solutions.size());
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        for (std::size_t s = 0; s < sigmas.size(); ++s) {
            table.reports[i].push_back(perturbation_cloud(objective, solutions[i], sigmas[s],
                                                          count, per_trials, base_trials,
                                                          derive_seed(seed, i, s)));
        }
    }
    table.pairwise.resize(sigmas.size());
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
        table.pairwise[s].resize(solutions.size());
        for (std::size_t i = 0; i < solutions.size(); ++i) {
            table.pairwise[s][i].resize(solutions.size());
            for (std::size_t j = 0; j < solutions.size(); ++j) {
                if (i == j) continue;
                table.pairwise[s][i][j] =
                    mann_whitney_u(table.reports[i][s].perturbed_performances,
                                   table.reports[j][s].perturbed_performances, alternative);
            }
        }
    }
    table.base_match.assign(solutions.size(), std::vector<bool>(solutions.size(), true));
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        for (std::size_t j = 0; j < solutions.size(); ++j) {
            const double a = table.reports[i][0].base_performance;
            const double b = table.reports[j][0].base_performance;
            table.base_match[i][j] =
                std::abs(a - b) <= 0.05 * std::max(std::abs(a), std::abs(b));
        }
    }
    return table;
}

}  // namespace eslab
