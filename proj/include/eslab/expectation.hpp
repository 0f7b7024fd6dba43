#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "eslab/core.hpp"
#include "eslab/landscape.hpp"
#include "eslab/optimize.hpp"
#include "eslab/rng.hpp"

namespace eslab {

enum class ExpectationMethod { quadrature, monte_carlo };

struct ExpectedFitnessEstimate {
    double value = 0.0;
    double standard_error = 0.0;  // 0 for quadrature
    ExpectationMethod method = ExpectationMethod::quadrature;
    long long samples_or_nodes = 0;
};

struct GaussHermiteRule {
    std::vector<double> nodes;    // zeros of the physicists' Hermite polynomial
    std::vector<double> weights;  // sum to sqrt(pi)
};

namespace detail {

// Eigenvalues and first eigenvector components of a symmetric tridiagonal
// matrix via the implicit-shift QL algorithm (Golub-Welsch companion).
// diag/offdiag are modified in place; z accumulates first-row components.
inline void tridiagonal_eigen(std::vector<double>& diag, std::vector<double>& offdiag,
                              std::vector<double>& z) {
    const int n = static_cast<int>(diag.size());
    z.assign(n, 0.0);
    std::vector<std::vector<double>> vec(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) vec[i][i] = 1.0;
    offdiag.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(offdiag[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw std::runtime_error("tridiagonal_eigen: no convergence");
                double g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + offdiag[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * offdiag[i];
                    const double b = c * offdiag[i];
                    r = std::hypot(f, g);
                    offdiag[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        offdiag[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = vec[k][i + 1];
                        vec[k][i + 1] = s * vec[k][i] + c * f;
                        vec[k][i] = c * vec[k][i] - s * f;
                    }
                }
                if (underflow) continue;
                diag[l] -= p;
                offdiag[l] = g;
                offdiag[m] = 0.0;
            }
        } while (m != l);
    }
    for (int i = 0; i < n; ++i) z[i] = vec[0][i];
    // Sort eigenvalues (and first components) ascending.
    for (int i = 0; i < n - 1; ++i) {
        int kmin = i;
        for (int j = i + 1; j < n; ++j) {
            if (diag[j] < diag[kmin]) kmin = j;
        }
        std::swap(diag[i], diag[kmin]);
        std::swap(z[i], z[kmin]);
    }
}

}  // namespace detail

// Physicists' Gauss-Hermite rule (weight exp(-x^2)) via the Golub-Welsch
// eigenvalue method on the Jacobi matrix.
inline GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    std::vector<double> diag(n, 0.0);
    std::vector<double> offdiag(n > 1 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) offdiag[k - 1] = std::sqrt(0.5 * k);
    std::vector<double> z;
    detail::tridiagonal_eigen(diag, offdiag, z);
    GaussHermiteRule rule;
    rule.nodes = diag;
    rule.weights.resize(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int i = 0; i < n; ++i) rule.weights[i] = sqrt_pi * z[i] * z[i];
    return rule;
}

// Expected fitness J(mean) under an isotropic Gaussian of scale sigma, by
// tensor-product Gauss-Hermite quadrature: nodes at mean + sigma*sqrt(2)*h,
// normalized by pi^(-d/2).
inline ExpectedFitnessEstimate expected_fitness_quadrature(const Landscape& landscape,
                                                           const ParamVector& mean, double sigma,
                                                           int nodes_per_dim = 41) {
    if (!(sigma > 0.0)) throw std::invalid_argument("expected_fitness_quadrature: sigma must be > 0");
    if (nodes_per_dim < 3 || nodes_per_dim % 2 == 0) {
        throw std::invalid_argument(
            "expected_fitness_quadrature: nodes_per_dim must be odd and >= 3");
    }
    const GaussHermiteRule rule = gauss_hermite(nodes_per_dim);
    const std::size_t d = mean.size();
    const double scale = sigma * std::sqrt(2.0);
    std::vector<int> idx(d, 0);
    ParamVector point(d);
    double total = 0.0;
    // Odometer loop over the tensor grid, accumulated in lexicographic index
    // order for determinism.
    while (true) {
        double w = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            w *= rule.weights[idx[k]];
            point[k] = mean[k] + scale * rule.nodes[idx[k]];
        }
        total += w * landscape.evaluate(point);
        std::size_t k = 0;
        while (k < d) {
            if (++idx[k] < nodes_per_dim) break;
            idx[k] = 0;
            ++k;
        }
        if (k == d) break;
    }
    ExpectedFitnessEstimate est;
    est.value = total / std::pow(std::numbers::pi, 0.5 * static_cast<double>(d));
    est.standard_error = 0.0;
    est.method = ExpectationMethod::quadrature;
    long long count = 1;
    for (std::size_t k = 0; k < d; ++k) count *= nodes_per_dim;
    est.samples_or_nodes = count;
    return est;
}

// Monte Carlo estimate of the same expectation with its standard error.
inline ExpectedFitnessEstimate expected_fitness_mc(const Landscape& landscape,
                                                   const ParamVector& mean, double sigma,
                                                   long long samples, GaussianStream& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("expected_fitness_mc: sigma must be > 0");
    if (samples < 2) throw std::invalid_argument("expected_fitness_mc: samples must be >= 2");
    const std::size_t d = mean.size();
    ParamVector point(d), draw(d);
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < samples; ++i) {
        rng.normal_vector(d, draw);
        for (std::size_t k = 0; k < d; ++k) point[k] = mean[k] + sigma * draw[k];
        const double f = landscape.evaluate(point);
        sum += f;
        sumsq += f * f;
    }
    const double n = static_cast<double>(samples);
    const double value = sum / n;
    const double var = std::max(0.0, (sumsq - n * value * value) / (n - 1.0));
    ExpectedFitnessEstimate est;
    est.value = value;
    est.standard_error = std::sqrt(var / n);
    est.method = ExpectationMethod::monte_carlo;
    est.samples_or_nodes = samples;
    return est;
}

struct DivergencePoint {
    int iteration = 0;
    double fitness_at_mean = 0.0;
    double expected_fitness = 0.0;
};

// Recomputes fitness-at-mean and quadrature expected fitness at every
// recorded iterate of a trajectory.
inline std::vector<DivergencePoint> divergence_curve(
    const std::vector<TrajectoryRecord>& trajectory, const Landscape& landscape, double sigma,
    int nodes_per_dim = 41) {
    if (trajectory.empty()) throw std::invalid_argument("divergence_curve: empty trajectory");
    std::vector<DivergencePoint> out;
    out.reserve(trajectory.size());
    for (const auto& rec : trajectory) {
        DivergencePoint pt;
        pt.iteration = rec.iteration;
        pt.fitness_at_mean = landscape.evaluate(rec.iterate);
        pt.expected_fitness =
            expected_fitness_quadrature(landscape, rec.iterate, sigma, nodes_per_dim).value;
        out.push_back(pt);
    }
    return out;
}

}  // namespace eslab
