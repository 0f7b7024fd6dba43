#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eslab {

// A point in the d-dimensional domain parameter space.
using ParamVector = std::vector<double>;

// Raised when a fitness evaluation produces (or receives) a non-finite value
// or is otherwise invalid at runtime.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by experiment configuration interpretation/validation; carries the
// offending field so callers can report it precisely.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline bool all_finite(const ParamVector& p) {
    for (double v : p) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

inline double squared_distance(const ParamVector& a, const ParamVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const ParamVector& a, const ParamVector& b) {
    return std::sqrt(squared_distance(a, b));
}

inline double norm(const ParamVector& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace eslab
