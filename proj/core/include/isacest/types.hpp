// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace isacest {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Invalid user-supplied configuration. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vector or matrix sizes that do not agree with the allocation mask.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rank-deficient linear system (coinciding paths, degenerate sampling).
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite cost inside an iterative optimizer. Carries the accepted cost
/// history up to the failure.
class OptimizationError : public std::runtime_error {
public:
    OptimizationError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Malformed structured-text input.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Wraps a normalized delay into (0, 1].
inline double wrap_delay(double tau) {
    if (tau > 0.0 && tau <= 1.0) return tau;
    return tau - std::ceil(tau) + 1.0;
}

/// Wraps a normalized Doppler shift into (-0.5, 0.5].
inline double wrap_doppler(double alpha) {
    if (alpha > -0.5 && alpha <= 0.5) return alpha;
    return alpha - std::ceil(alpha - 0.5);
}

/// Signed distance between two points on the unit circle, in (-0.5, 0.5].
inline double wrapped_difference(double a, double b) {
    return wrap_doppler(a - b);
}

}  // namespace isacest
