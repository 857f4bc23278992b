#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace armsafe {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec14 = Eigen::Matrix<double, 14, 1>;
using VecX = Eigen::VectorXd;

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat14 = Eigen::Matrix<double, 14, 14>;
using MatX = Eigen::MatrixXd;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using RowVecX = Eigen::RowVectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Invalid model data (bad inertia, limits, axes, dimensions).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario / filter / estimator configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate geometry in the minimum-scaling solve. Carries the last
/// root-finder bracket for diagnosis.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(const std::string& what, double bracket_lo, double bracket_hi)
      : std::runtime_error(what), bracket_lo(bracket_lo), bracket_hi(bracket_hi) {}
  explicit GeometryError(const std::string& what)
      : std::runtime_error(what), bracket_lo(0.0), bracket_hi(0.0) {}

  double bracket_lo;
  double bracket_hi;
};

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

inline bool approx_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace armsafe
