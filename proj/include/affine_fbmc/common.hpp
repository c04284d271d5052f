// common.hpp - shared aliases and error types for the affine FBMC/OQAM simulator
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace affine_fbmc {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Samples = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;

// Invalid parameters (overlap factor, n < N, Hadamard size, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data whose shape or length does not match what an operation expects.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string dims(Eigen::Index rows, Eigen::Index cols)
{
    return std::to_string(rows) + "x" + std::to_string(cols);
}

} // namespace detail
} // namespace affine_fbmc
