#pragma once

#include <Eigen/Dense>
#include <complex>

namespace olrg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kImag{0.0, 1.0};

}  // namespace olrg
