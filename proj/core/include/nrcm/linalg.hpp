#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nrcm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into (-pi, pi].
double wrap_phase(double radians);

/// Largest absolute entry of `m`; zero for an empty matrix.
double max_abs(const CMatrix& m);

/// max_jk |(S^H S - I)_jk|.
double unitarity_defect(const CMatrix& s);

}  // namespace nrcm
