#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace nhfa {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;

/// Numerical failure while executing an otherwise valid request
/// (non-convergence, broken pairing, non-finite evaluation).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nhfa
