#ifndef LATDISS_TYPES_HPP
#define LATDISS_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace latdiss {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Thrown when a numerical routine fails to meet its convergence or
/// consistency target (eigensolver breakdown, pole collision, ...).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown for malformed configuration files or CLI overrides.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace latdiss

#endif
