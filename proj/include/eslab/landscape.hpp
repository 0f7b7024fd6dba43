#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eslab/core.hpp"

namespace eslab {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

// A deterministic scalar fitness function over a bounded d-dimensional
// domain. Bounds are advisory (used for grids and initialization); the
// functional form is defined everywhere and never clamped.
class Landscape {
public:
    Landscape(std::string name, int dim, std::vector<Interval> bounds,
              std::vector<std::pair<std::string, double>> params,
              std::function<double(const ParamVector&)> fn)
        : name_(std::move(name)),
          dim_(dim),
          bounds_(std::move(bounds)),
          params_(std::move(params)),
          fn_(std::move(fn)) {}

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    const std::vector<Interval>& bounds() const { return bounds_; }
    const std::vector<std::pair<std::string, double>>& params() const { return params_; }

    double evaluate(const ParamVector& p) const {
        if (static_cast<int>(p.size()) != dim_) {
            throw std::invalid_argument("Landscape '" + name_ + "': point has dimension " +
                                        std::to_string(p.size()) + ", expected " +
                                        std::to_string(dim_));
        }
        if (!all_finite(p)) {
            throw std::invalid_argument("Landscape '" + name_ + "': non-finite coordinate");
        }
        const double v = fn_(p);
        if (!std::isfinite(v)) {
            throw EvaluationError("Landscape '" + name_ + "': non-finite fitness");
        }
        return v;
    }

    double operator()(const ParamVector& p) const { return evaluate(p); }

    // Structured text listing the name and all named parameters.
    std::string manifest() const {
        std::ostringstream out;
        out << "name " << name_ << "\n";
        out << "dim " << dim_ << "\n";
        for (const auto& [k, v] : params_) {
            std::ostringstream num;
            num.precision(12);
            num << v;
            out << k << " " << num.str() << "\n";
        }
        return out.str();
    }

private:
    std::string name_;
    int dim_;
    std::vector<Interval> bounds_;
    std::vector<std::pair<std::string, double>> params_;
    std::function<double(const ParamVector&)> fn_;
};

namespace detail {
inline std::vector<Interval> unit_bounds(int dim) {
    return std::vector<Interval>(static_cast<std::size_t>(dim), Interval{0.0, 1.0});
}
}  // namespace detail

// Gaussian peak with the neighborhood around (and including) the peak
// flattened to zero fitness. The circle at hole_radius itself is unflattened.
inline Landscape make_donut(const ParamVector& center, double spread, double hole_radius,
                            double amplitude) {
    if (!(spread > 0.0)) throw std::invalid_argument("make_donut: spread must be > 0");
    if (!(hole_radius > 0.0)) throw std::invalid_argument("make_donut: hole_radius must be > 0");
    if (!(amplitude > 0.0)) throw std::invalid_argument("make_donut: amplitude must be > 0");
    if (center.empty() || !all_finite(center)) {
        throw std::invalid_argument("make_donut: center must be non-empty and finite");
    }
    const int dim = static_cast<int>(center.size());
    std::vector<std::pair<std::string, double>> params;
    params.emplace_back("center_x", center[0]);
    if (dim >= 2) params.emplace_back("center_y", center[1]);
    params.emplace_back("spread", spread);
    params.emplace_back("hole_radius", hole_radius);
    params.emplace_back("amplitude", amplitude);
    auto fn = [center, spread, hole_radius, amplitude](const ParamVector& p) {
        const double r2 = squared_distance(p, center);
        if (r2 < hole_radius * hole_radius) return 0.0;
        return amplitude * std::exp(-r2 / (2.0 * spread * spread));
    };
    return Landscape("donut", dim, detail::unit_bounds(dim), std::move(params), std::move(fn));
}

// Linear fitness ramp along x confined to a path around y = path_y whose
// width shrinks linearly from base_width (x=0) to tip_width (x=1).
inline Landscape make_narrowing_path(double base_width, double tip_width, double path_y) {
    if (!(base_width > tip_width && tip_width > 0.0)) {
        throw std::invalid_argument("make_narrowing_path: requires base_width > tip_width > 0");
    }
    std::vector<std::pair<std::string, double>> params = {
        {"base_width", base_width}, {"tip_width", tip_width}, {"path_y", path_y}};
    auto fn = [base_width, tip_width, path_y](const ParamVector& p) {
        const double x = p[0], y = p[1];
        const double w = (1.0 - x) * base_width + x * tip_width;
        if (w <= 0.0) return 0.0;
        if (std::abs(y - path_y) <= 0.5 * w) return x;
        return 0.0;
    };
    return Landscape("narrowing_path", 2, detail::unit_bounds(2), std::move(params),
                     std::move(fn));
}

// Gentle ramp with a series of small Gaussian local optima and a large
// Gaussian goal peak. Construction validates that each bump really creates a
// strict local maximum against the ramp: the bump's maximal inward gradient
// amplitude/(width*sqrt(e)) must exceed the ramp slope.
inline Landscape make_fleeting_peaks(double ramp_slope, const std::vector<ParamVector>& bumps,
                                     double bump_amplitude, double bump_width,
                                     const ParamVector& goal_center, double goal_amplitude,
                                     double goal_width) {
    if (!(bump_amplitude > 0.0)) {
        throw std::invalid_argument("make_fleeting_peaks: bump_amplitude must be > 0");
    }
    if (!(goal_amplitude > bump_amplitude)) {
        throw std::invalid_argument(
            "make_fleeting_peaks: goal_amplitude must exceed bump_amplitude");
    }
    if (!(bump_width > 0.0 && goal_width > 0.0)) {
        throw std::invalid_argument("make_fleeting_peaks: widths must be > 0");
    }
    const double max_inward_gradient = bump_amplitude / (bump_width * std::sqrt(std::exp(1.0)));
    for (std::size_t j = 0; j < bumps.size(); ++j) {
        if (bumps[j].size() != 2) {
            throw std::invalid_argument("make_fleeting_peaks: bump " + std::to_string(j) +
                                        " is not 2-dimensional");
        }
        if (!(max_inward_gradient > ramp_slope)) {
            throw std::invalid_argument(
                "make_fleeting_peaks: bump " + std::to_string(j) +
                " creates no strict local maximum (maximal inward gradient " +
                std::to_string(max_inward_gradient) + " does not exceed ramp_slope " +
                std::to_string(ramp_slope) + ")");
        }
    }
    std::vector<std::pair<std::string, double>> params = {{"ramp_slope", ramp_slope}};
    for (std::size_t j = 0; j < bumps.size(); ++j) {
        params.emplace_back("bump" + std::to_string(j) + "_x", bumps[j][0]);
        params.emplace_back("bump" + std::to_string(j) + "_y", bumps[j][1]);
    }
    params.emplace_back("bump_amplitude", bump_amplitude);
    params.emplace_back("bump_width", bump_width);
    params.emplace_back("goal_x", goal_center[0]);
    params.emplace_back("goal_y", goal_center[1]);
    params.emplace_back("goal_amplitude", goal_amplitude);
    params.emplace_back("goal_width", goal_width);
    auto fn = [ramp_slope, bumps, bump_amplitude, bump_width, goal_center, goal_amplitude,
               goal_width](const ParamVector& p) {
        double v = ramp_slope * p[0];
        for (const auto& b : bumps) {
            v += bump_amplitude * std::exp(-squared_distance(p, b) / (2.0 * bump_width * bump_width));
        }
        v += goal_amplitude *
             std::exp(-squared_distance(p, goal_center) / (2.0 * goal_width * goal_width));
        return v;
    };
    return Landscape("fleeting_peaks", 2, detail::unit_bounds(2), std::move(params),
                     std::move(fn));
}

// Linear ramp along a horizontal path, interrupted by a zero-fitness gap on
// [gap_left, gap_right]. With cliff=false the ramp resumes beyond the gap;
// with cliff=true everything beyond gap_left is zero.
inline Landscape make_gradient_gap(double ramp_slope, double gap_left, double gap_right,
                                   double path_half_width, bool cliff) {
    if (!(0.0 < gap_left && gap_left < gap_right && gap_right < 1.0)) {
        throw std::invalid_argument(
            "make_gradient_gap: requires 0 < gap_left < gap_right < 1");
    }
    std::vector<std::pair<std::string, double>> params = {{"ramp_slope", ramp_slope},
                                                          {"gap_left", gap_left},
                                                          {"gap_right", gap_right},
                                                          {"path_half_width", path_half_width}};
    auto fn = [ramp_slope, gap_left, gap_right, path_half_width, cliff](const ParamVector& p) {
        const double x = p[0], y = p[1];
        if (std::abs(y - 0.5) > path_half_width) return 0.0;
        if (x < gap_left) return ramp_slope * x;
        if (x <= gap_right) return 0.0;
        return cliff ? 0.0 : ramp_slope * x;
    };
    return Landscape(cliff ? "gradient_cliff" : "gradient_gap", 2, detail::unit_bounds(2),
                     std::move(params), std::move(fn));
}

// ---------------------------------------------------------------------------
// Registry: named landscapes with default parameters and override support.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& landscape_names() {
    static const std::vector<std::string> names = {
        "donut", "narrowing_path", "fleeting_peaks", "gradient_gap", "gradient_cliff"};
    return names;
}

inline std::vector<std::pair<std::string, double>> default_landscape_params(
    const std::string& name) {
    if (name == "donut") {
        return {{"center_x", 0.5}, {"center_y", 0.5}, {"spread", 0.2},
                {"hole_radius", 0.1}, {"amplitude", 1.0}};
    }
    if (name == "narrowing_path") {
        return {{"base_width", 0.4}, {"tip_width", 0.01}, {"path_y", 0.5}};
    }
    if (name == "fleeting_peaks") {
        return {{"ramp_slope", 0.5},   {"bump_first_x", 0.2}, {"bump_last_x", 0.65},
                {"bump_count", 4.0},   {"bump_y", 0.5},       {"bump_amplitude", 0.3},
                {"bump_width", 0.05},  {"goal_x", 0.9},       {"goal_y", 0.5},
                {"goal_amplitude", 2.0}, {"goal_width", 0.1}};
    }
    if (name == "gradient_gap" || name == "gradient_cliff") {
        return {{"ramp_slope", 1.0}, {"gap_left", 0.45}, {"gap_right", 0.65},
                {"path_half_width", 0.2}};
    }
    throw std::invalid_argument("unknown landscape '" + name + "'");
}

// Builds a named landscape from its defaults with optional parameter
// overrides. Unknown parameter names are rejected.
inline Landscape make_landscape(
    const std::string& name,
    const std::vector<std::pair<std::string, double>>& overrides = {}) {
    auto params = default_landscape_params(name);
    for (const auto& [k, v] : overrides) {
        auto it = std::find_if(params.begin(), params.end(),
                               [&](const auto& kv) { return kv.first == k; });
        if (it == params.end()) {
            throw std::invalid_argument("landscape '" + name + "': unknown parameter '" + k +
                                        "'");
        }
        it->second = v;
    }
    auto get = [&](const std::string& k) {
        return std::find_if(params.begin(), params.end(),
                            [&](const auto& kv) { return kv.first == k; })
            ->second;
    };
    if (name == "donut") {
        return make_donut({get("center_x"), get("center_y")}, get("spread"),
                          get("hole_radius"), get("amplitude"));
    }
    if (name == "narrowing_path") {
        return make_narrowing_path(get("base_width"), get("tip_width"), get("path_y"));
    }
    if (name == "fleeting_peaks") {
        const int count = static_cast<int>(get("bump_count"));
        if (count < 1) throw std::invalid_argument("fleeting_peaks: bump_count must be >= 1");
        std::vector<ParamVector> bumps;
        const double x0 = get("bump_first_x"), x1 = get("bump_last_x"), y = get("bump_y");
        for (int j = 0; j < count; ++j) {
            const double t = (count == 1) ? 0.0 : static_cast<double>(j) / (count - 1);
            bumps.push_back({x0 + t * (x1 - x0), y});
        }
        return make_fleeting_peaks(get("ramp_slope"), bumps, get("bump_amplitude"),
                                   get("bump_width"), {get("goal_x"), get("goal_y")},
                                   get("goal_amplitude"), get("goal_width"));
    }
    if (name == "gradient_gap" || name == "gradient_cliff") {
        return make_gradient_gap(get("ramp_slope"), get("gap_left"), get("gap_right"),
                                 get("path_half_width"), name == "gradient_cliff");
    }
    throw std::invalid_argument("unknown landscape '" + name + "'");
}

// ---------------------------------------------------------------------------
// Grid sampling for heatmap export.
// ---------------------------------------------------------------------------

struct GridData {
    int resolution = 0;
    Interval x_bounds;
    Interval y_bounds;
    std::vector<double> values;  // row-major, y-outer x-inner
};

inline GridData grid_sample(const Landscape& landscape, int resolution) {
    if (landscape.dim() != 2) {
        throw std::invalid_argument("grid_sample: landscape must be 2-dimensional");
    }
    if (resolution < 2) {
        throw std::invalid_argument("grid_sample: resolution must be >= 2");
    }
    GridData grid;
    grid.resolution = resolution;
    grid.x_bounds = landscape.bounds()[0];
    grid.y_bounds = landscape.bounds()[1];
    grid.values.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int iy = 0; iy < resolution; ++iy) {
        const double y = grid.y_bounds.lo +
                         (grid.y_bounds.hi - grid.y_bounds.lo) * iy / (resolution - 1);
        for (int ix = 0; ix < resolution; ++ix) {
            const double x = grid.x_bounds.lo +
                             (grid.x_bounds.hi - grid.x_bounds.lo) * ix / (resolution - 1);
            grid.values.push_back(landscape.evaluate({x, y}));
        }
    }
    return grid;
}

}  // namespace eslab
