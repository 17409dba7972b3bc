#ifndef ACL_COMMON_HPP
#define ACL_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace acl {

using cdouble = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shapes of two objects do not match (vector length, matrix dims, sketch size).
struct DimensionError : Error {
    using Error::Error;
};

/// Invalid argument value (out-of-range index, bad flag combination).
struct ArgumentError : Error {
    using Error::Error;
};

/// Malformed or empty input data (CSV parse failures, empty datasets).
struct DataError : Error {
    using Error::Error;
};

/// Periodic function has |F1| = 0, so renormalization by 1/F1 is impossible.
struct DegenerateFunctionError : Error {
    using Error::Error;
};

/// Sketches produced by different feature maps cannot be merged or compared.
struct IncompatibleSketchError : Error {
    using Error::Error;
};

/// Analytic model sketches of Gaussian mixtures exist only for the complex
/// exponential nonlinearity.
struct UnsupportedAnalyticSketchError : Error {
    using Error::Error;
};

/// Task specification cannot be satisfied (empty box, infeasible separation).
struct InfeasibleError : Error {
    using Error::Error;
};

}  // namespace acl

#endif  // ACL_COMMON_HPP
