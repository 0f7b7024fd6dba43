#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "eslab/core.hpp"
#include "eslab/landscape.hpp"
#include "eslab/rng.hpp"

namespace eslab {

// Isotropic Gaussian search distribution: the mean moves, sigma never does.
struct SearchDistribution {
    ParamVector mean;
    double sigma = 0.0;
};

struct EsConfig {
    double sigma = 0.16;
    int population = 64;
    double learning_rate = 0.01;
    bool mirrored = true;
    bool rank_shaping = false;
    int iterations = 100;
    std::uint64_t seed = 0;
};

struct FdConfig {
    double epsilon = 1e-7;
    double learning_rate = 0.01;
    double momentum_beta = 0.0;  // 0 = vanilla ascent
    int iterations = 100;
};

struct GaConfig {
    int population = 200;
    double truncation_fraction = 0.05;
    double mutation_sigma = 0.002;
    int elitism = 1;
    int iterations = 100;
    std::uint64_t seed = 0;
};

struct TrajectoryRecord {
    int iteration = 0;
    ParamVector iterate;  // ES: distribution mean; FD: current point; GA: best
    double fitness_at_iterate = 0.0;
    std::optional<double> expected_fitness;  // ES only: step population average
    std::optional<double> grad_norm;
    long long evaluations_used = 0;  // cumulative
};

// Carries the trajectory accumulated before a run-aborting evaluation error.
class RunAbortedError : public EvaluationError {
public:
    RunAbortedError(const std::string& what, std::vector<TrajectoryRecord> partial)
        : EvaluationError(what), partial_(std::move(partial)) {}
    const std::vector<TrajectoryRecord>& partial_trajectory() const { return partial_; }

private:
    std::vector<TrajectoryRecord> partial_;
};

namespace detail {

// Centered midrank weights: ties get the average of the ranks they occupy,
// and the weights always sum to zero. Any strictly monotone transform of the
// fitnesses yields bit-identical weights.
inline std::vector<double> centered_rank_weights(const std::vector<double>& fitness) {
    const std::size_t n = fitness.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    std::vector<double> weights(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && fitness[order[j + 1]] == fitness[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        const double w = (midrank - 0.5 * (n + 1)) / (n > 1 ? (n - 1) : 1);
        for (std::size_t k = i; k <= j; ++k) weights[order[k]] = w;
        i = j + 1;
    }
    return weights;
}

}  // namespace detail

struct EsGradientEstimate {
    ParamVector gradient;
    double mean_sample_fitness = 0.0;
    long long evaluations = 0;
};

// Score-function search-gradient estimate g = (1/(n*sigma)) * sum_i s_i*eps_i,
// where s_i is the raw fitness (rank_shaping=false) or a centered rank weight.
// Mirrored sampling evaluates perturbations in +/- pairs; the raw-fitness
// variant then accumulates paired differences so that symmetric components
// (e.g. any additive constant) cancel exactly.
inline EsGradientEstimate es_gradient_estimate(const Landscape& landscape,
                                               const SearchDistribution& dist, int population,
                                               bool mirrored, bool rank_shaping,
                                               GaussianStream& rng) {
    if (population < 2) throw std::invalid_argument("es_gradient_estimate: population must be >= 2");
    if (mirrored && population % 2 != 0) {
        throw std::invalid_argument("es_gradient_estimate: mirrored sampling needs an even population");
    }
    const std::size_t d = dist.mean.size();
    const double sigma = dist.sigma;
    std::vector<ParamVector> eps;  // signed perturbation directions, sample order
    std::vector<double> fitness;   // raw fitnesses, sample order
    ParamVector probe(d), direction(d);
    if (mirrored) {
        for (int i = 0; i < population / 2; ++i) {
            rng.normal_vector(d, direction);
            ParamVector neg(d);
            for (std::size_t k = 0; k < d; ++k) {
                probe[k] = dist.mean[k] + sigma * direction[k];
                neg[k] = -direction[k];
            }
            eps.push_back(direction);
            fitness.push_back(landscape.evaluate(probe));
            for (std::size_t k = 0; k < d; ++k) probe[k] = dist.mean[k] - sigma * direction[k];
            eps.push_back(std::move(neg));
            fitness.push_back(landscape.evaluate(probe));
        }
    } else {
        for (int i = 0; i < population; ++i) {
            rng.normal_vector(d, direction);
            for (std::size_t k = 0; k < d; ++k) probe[k] = dist.mean[k] + sigma * direction[k];
            eps.push_back(direction);
            fitness.push_back(landscape.evaluate(probe));
        }
    }

    ParamVector grad(d, 0.0);
    if (rank_shaping) {
        const std::vector<double> weights = detail::centered_rank_weights(fitness);
        for (std::size_t i = 0; i < eps.size(); ++i) {
            for (std::size_t k = 0; k < d; ++k) grad[k] += weights[i] * eps[i][k];
        }
    } else if (mirrored) {
        // Accumulate paired differences: (f+ - f-) * eps. Equivalent to
        // sum_i s_i * eps_i over the signed pairs, but exactly invariant to
        // additive fitness constants.
        for (std::size_t i = 0; i + 1 < eps.size(); i += 2) {
            const double delta = fitness[i] - fitness[i + 1];
            for (std::size_t k = 0; k < d; ++k) grad[k] += delta * eps[i][k];
        }
    } else {
        for (std::size_t i = 0; i < eps.size(); ++i) {
            for (std::size_t k = 0; k < d; ++k) grad[k] += fitness[i] * eps[i][k];
        }
    }
    for (std::size_t k = 0; k < d; ++k) grad[k] /= population * sigma;

    EsGradientEstimate est;
    est.gradient = std::move(grad);
    est.mean_sample_fitness =
        std::accumulate(fitness.begin(), fitness.end(), 0.0) / fitness.size();
    est.evaluations = static_cast<long long>(fitness.size());
    return est;
}

// Fixed-variance ES ascent on the search distribution's mean.
inline std::vector<TrajectoryRecord> es_run(const Landscape& landscape, const ParamVector& start,
                                            const EsConfig& cfg) {
    if (!(cfg.sigma > 0.0)) throw std::invalid_argument("es_run: sigma must be > 0");
    if (!(cfg.learning_rate > 0.0) && cfg.learning_rate != 0.0) {
        throw std::invalid_argument("es_run: learning_rate must be >= 0");
    }
    std::vector<TrajectoryRecord> records;
    GaussianStream rng(cfg.seed);
    SearchDistribution dist{start, cfg.sigma};
    long long evals = 0;
    try {
        TrajectoryRecord first;
        first.iteration = 0;
        first.iterate = dist.mean;
        first.fitness_at_iterate = landscape.evaluate(dist.mean);
        first.evaluations_used = ++evals;
        records.push_back(std::move(first));
        for (int t = 1; t <= cfg.iterations; ++t) {
            EsGradientEstimate est = es_gradient_estimate(landscape, dist, cfg.population,
                                                          cfg.mirrored, cfg.rank_shaping, rng);
            evals += est.evaluations;
            for (std::size_t k = 0; k < dist.mean.size(); ++k) {
                dist.mean[k] += cfg.learning_rate * est.gradient[k];
            }
            TrajectoryRecord rec;
            rec.iteration = t;
            rec.iterate = dist.mean;
            rec.fitness_at_iterate = landscape.evaluate(dist.mean);
            rec.expected_fitness = est.mean_sample_fitness;
            rec.grad_norm = norm(est.gradient);
            rec.evaluations_used = ++evals;
            records.push_back(std::move(rec));
        }
    } catch (const EvaluationError& e) {
        throw RunAbortedError(std::string("es_run aborted: ") + e.what(), std::move(records));
    }
    return records;
}

// Central-difference gradient: component j = (f(p+eps*e_j) - f(p-eps*e_j)) / (2 eps).
inline ParamVector fd_gradient(const Landscape& landscape, const ParamVector& p, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("fd_gradient: epsilon must be > 0");
    ParamVector grad(p.size(), 0.0);
    ParamVector probe = p;
    for (std::size_t j = 0; j < p.size(); ++j) {
        probe[j] = p[j] + epsilon;
        const double hi = landscape.evaluate(probe);
        probe[j] = p[j] - epsilon;
        const double lo = landscape.evaluate(probe);
        probe[j] = p[j];
        grad[j] = (hi - lo) / (2.0 * epsilon);
    }
    return grad;
}

// Deterministic gradient ascent with optional heavy-ball momentum:
// v <- beta*v + g; p <- p + lr*v.
inline std::vector<TrajectoryRecord> fd_run(const Landscape& landscape, const ParamVector& start,
                                            const FdConfig& cfg) {
    if (!(cfg.momentum_beta >= 0.0 && cfg.momentum_beta < 1.0)) {
        throw std::invalid_argument("fd_run: momentum_beta must be in [0,1)");
    }
    std::vector<TrajectoryRecord> records;
    ParamVector p = start;
    ParamVector v(p.size(), 0.0);
    long long evals = 0;
    try {
        TrajectoryRecord first;
        first.iteration = 0;
        first.iterate = p;
        first.fitness_at_iterate = landscape.evaluate(p);
        first.evaluations_used = ++evals;
        records.push_back(std::move(first));
        for (int t = 1; t <= cfg.iterations; ++t) {
            ParamVector g = fd_gradient(landscape, p, cfg.epsilon);
            evals += 2 * static_cast<long long>(p.size());
            for (std::size_t k = 0; k < p.size(); ++k) {
                v[k] = cfg.momentum_beta * v[k] + g[k];
                p[k] += cfg.learning_rate * v[k];
            }
            TrajectoryRecord rec;
            rec.iteration = t;
            rec.iterate = p;
            rec.fitness_at_iterate = landscape.evaluate(p);
            rec.grad_norm = norm(g);
            rec.evaluations_used = ++evals;
            records.push_back(std::move(rec));
        }
    } catch (const EvaluationError& e) {
        throw RunAbortedError(std::string("fd_run aborted: ") + e.what(), std::move(records));
    }
    return records;
}

// Truncation-selection GA over real vectors. Generation 0 is the start point
// plus (population-1) Gaussian perturbations; each generation keeps the top
// ceil(truncation_fraction*population), carries over `elitism` individuals
// unchanged, and refills by mutating uniformly chosen survivors.
inline std::vector<TrajectoryRecord> ga_run(const Landscape& landscape, const ParamVector& start,
                                            const GaConfig& cfg) {
    if (cfg.population < 2) throw std::invalid_argument("ga_run: population must be >= 2");
    if (!(cfg.truncation_fraction > 0.0 && cfg.truncation_fraction <= 1.0)) {
        throw std::invalid_argument("ga_run: truncation_fraction must be in (0,1]");
    }
    if (!(cfg.mutation_sigma > 0.0)) throw std::invalid_argument("ga_run: mutation_sigma must be > 0");
    if (cfg.elitism < 0) throw std::invalid_argument("ga_run: elitism must be >= 0");

    const std::size_t d = start.size();
    const int survivors =
        static_cast<int>(std::ceil(cfg.truncation_fraction * cfg.population));
    GaussianStream rng(cfg.seed);
    std::vector<ParamVector> pop;
    pop.reserve(cfg.population);
    pop.push_back(start);
    ParamVector noise(d);
    for (int i = 1; i < cfg.population; ++i) {
        rng.normal_vector(d, noise);
        ParamVector ind = start;
        for (std::size_t k = 0; k < d; ++k) ind[k] += cfg.mutation_sigma * noise[k];
        pop.push_back(std::move(ind));
    }

    std::vector<TrajectoryRecord> records;
    long long evals = 0;
    try {
        for (int gen = 0; gen < cfg.iterations; ++gen) {
            std::vector<double> fitness(pop.size());
            for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = landscape.evaluate(pop[i]);
            evals += static_cast<long long>(pop.size());
            std::vector<std::size_t> order(pop.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return fitness[a] > fitness[b];
            });

            TrajectoryRecord rec;
            rec.iteration = gen;
            rec.iterate = pop[order[0]];
            rec.fitness_at_iterate = fitness[order[0]];
            rec.evaluations_used = evals;
            records.push_back(std::move(rec));

            std::vector<ParamVector> next;
            next.reserve(cfg.population);
            const int elites = std::min(cfg.elitism, cfg.population);
            for (int i = 0; i < elites; ++i) next.push_back(pop[order[i]]);
            while (static_cast<int>(next.size()) < cfg.population) {
                const std::size_t pick = rng.uniform_index(static_cast<std::uint64_t>(survivors));
                ParamVector child = pop[order[pick]];
                rng.normal_vector(d, noise);
                for (std::size_t k = 0; k < d; ++k) child[k] += cfg.mutation_sigma * noise[k];
                next.push_back(std::move(child));
            }
            pop = std::move(next);
        }
    } catch (const EvaluationError& e) {
        throw RunAbortedError(std::string("ga_run aborted: ") + e.what(), std::move(records));
    }
    return records;
}

}  // namespace eslab
