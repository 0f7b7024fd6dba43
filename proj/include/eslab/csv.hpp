#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eslab/core.hpp"
#include "eslab/expectation.hpp"
#include "eslab/landscape.hpp"
#include "eslab/optimize.hpp"
#include "eslab/robustness.hpp"

namespace eslab {

// Fixed decimal text with 12 significant digits (the file contracts require
// at least 9); one formatting path so artifacts are byte-stable.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

inline std::string trajectory_to_csv(const std::vector<TrajectoryRecord>& records) {
    std::ostringstream out;
    const std::size_t d = records.empty() ? 0 : records.front().iterate.size();
    out << "iteration";
    for (std::size_t k = 0; k < d; ++k) out << ",x" << k;
    out << ",fitness_at_iterate,expected_fitness,grad_norm,evaluations_used\n";
    for (const auto& rec : records) {
        out << rec.iteration;
        for (double x : rec.iterate) out << "," << format_number(x);
        out << "," << format_number(rec.fitness_at_iterate);
        out << ",";
        if (rec.expected_fitness) out << format_number(*rec.expected_fitness);
        out << ",";
        if (rec.grad_norm) out << format_number(*rec.grad_norm);
        out << "," << rec.evaluations_used << "\n";
    }
    return out.str();
}

inline std::string grid_to_csv(const GridData& grid) {
    std::ostringstream out;
    out << "x,y,fitness\n";
    std::size_t i = 0;
    for (int iy = 0; iy < grid.resolution; ++iy) {
        const double y = grid.y_bounds.lo +
                         (grid.y_bounds.hi - grid.y_bounds.lo) * iy / (grid.resolution - 1);
        for (int ix = 0; ix < grid.resolution; ++ix, ++i) {
            const double x = grid.x_bounds.lo +
                             (grid.x_bounds.hi - grid.x_bounds.lo) * ix / (grid.resolution - 1);
            out << format_number(x) << "," << format_number(y) << ","
                << format_number(grid.values[i]) << "\n";
        }
    }
    return out.str();
}

inline std::string divergence_to_csv(const std::vector<DivergencePoint>& curve) {
    std::ostringstream out;
    out << "iteration,fitness_at_mean,expected_fitness\n";
    for (const auto& pt : curve) {
        out << pt.iteration << "," << format_number(pt.fitness_at_mean) << ","
            << format_number(pt.expected_fitness) << "\n";
    }
    return out.str();
}

inline std::string robustness_to_csv(const RobustnessReport& report) {
    std::ostringstream out;
    out << "perturbation_index,performance\n";
    for (std::size_t i = 0; i < report.perturbed_performances.size(); ++i) {
        out << i << "," << format_number(report.perturbed_performances[i]) << "\n";
    }
    return out.str();
}

// JSON-like structured summary of a robustness report.
inline std::string robustness_summary(const RobustnessReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"base_performance\": " << format_number(report.base_performance) << ",\n";
    out << "  \"base_statistic\": \"mean\",\n";
    out << "  \"quartiles\": [" << format_number(report.quartiles.q1) << ", "
        << format_number(report.quartiles.median) << ", " << format_number(report.quartiles.q3)
        << "],\n";
    if (report.score_undefined) {
        out << "  \"robustness_score\": null,\n";
        out << "  \"score_undefined\": true,\n";
    } else {
        out << "  \"robustness_score\": " << format_number(report.robustness_score) << ",\n";
        out << "  \"score_undefined\": false,\n";
    }
    out << "  \"perturbation_sigma\": " << format_number(report.perturbation_sigma) << ",\n";
    out << "  \"perturbations\": " << report.perturbed_performances.size() << ",\n";
    out << "  \"seed\": " << report.seed << "\n";
    out << "}\n";
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace eslab
