#pragma once

#include <complex>
#include <Eigen/Dense>

namespace ristap {

using Real    = double;
using Complex = std::complex<Real>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using IVector = Eigen::VectorXi;
using Vec2    = Eigen::Vector2d;

constexpr Real kSpeedOfLight = 299792458.0;
constexpr Real kPi = 3.14159265358979323846;

inline Real db_to_linear(Real db) { return std::pow(10.0, db / 10.0); }
inline Real linear_to_db(Real lin) { return 10.0 * std::log10(lin); }

}  // namespace ristap
