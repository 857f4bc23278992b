#pragma once

#include <array>
#include <cmath>

#include "armsafe/common.hpp"

// Quaternion utilities. Quaternions are stored as (x, y, z, w) 4-vectors and
// represent world<-body orientations; rotation matrices map body vectors to
// world vectors. Derivative helpers differentiate the map xi -> R(xi/|xi|),
// so their quaternion partials are tangential (zero radial component) and
// match finite differences taken with renormalization.

namespace armsafe {

inline Vec4 quat_identity() { return Vec4(0.0, 0.0, 0.0, 1.0); }

inline Vec4 quat_normalized(const Vec4& xi) { return xi / xi.norm(); }

/// Rotation matrix of a unit quaternion (x,y,z,w).
inline Mat3 quat_to_rot(const Vec4& xi) {
  const double x = xi[0], y = xi[1], z = xi[2], w = xi[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
       2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
       2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

inline Vec4 quat_from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  const double half = 0.5 * angle;
  const double s = std::sin(half);
  return Vec4(a.x() * s, a.y() * s, a.z() * s, std::cos(half));
}

/// Hamilton product a*b for (x,y,z,w) quaternions.
inline Vec4 quat_mul(const Vec4& a, const Vec4& b) {
  const Vec3 av = a.head<3>(), bv = b.head<3>();
  const double aw = a[3], bw = b[3];
  Vec4 out;
  out.head<3>() = aw * bv + bw * av + av.cross(bv);
  out[3] = aw * bw - av.dot(bv);
  return out;
}

inline Vec4 quat_from_rot(const Mat3& r) {
  Eigen::Quaterniond q(r);
  return Vec4(q.x(), q.y(), q.z(), q.w());
}

/// Quaternion-rate map of xi_dot = 0.5 * Pi(xi) * omega, with omega the
/// world-frame angular velocity. Linear in xi, so d/dt Pi(xi) = Pi(xi_dot).
inline Eigen::Matrix<double, 4, 3> pi_matrix(const Vec4& xi) {
  const double x = xi[0], y = xi[1], z = xi[2], w = xi[3];
  Eigen::Matrix<double, 4, 3> pi;
  pi << w, z, -y,
        -z, w, x,
        y, -x, w,
        -x, -y, -z;
  return pi;
}

/// Pi with the unit-norm precondition enforced.
inline Eigen::Matrix<double, 4, 3> quat_rate_matrix(const Vec4& xi) {
  if (std::abs(xi.norm() - 1.0) > 1e-6) {
    throw ModelError("quat_rate_matrix: quaternion not unit-norm");
  }
  return pi_matrix(xi);
}

/// Flip the sign of xi if needed so that xi . reference >= 0 (the two signs
/// encode the same rotation; continuity of theta samples needs one branch).
inline Vec4 quat_align_sign(const Vec4& xi, const Vec4& reference) {
  return (xi.dot(reference) < 0.0) ? Vec4(-xi) : xi;
}

namespace detail {

/// First partials of the raw (un-normalized) quadratic rotation formula.
inline std::array<Mat3, 4> rot_partials_raw(const Vec4& xi) {
  const double x = xi[0], y = xi[1], z = xi[2], w = xi[3];
  std::array<Mat3, 4> d;
  d[0] << 0, 2 * y, 2 * z,
          2 * y, -4 * x, -2 * w,
          2 * z, 2 * w, -4 * x;
  d[1] << -4 * y, 2 * x, 2 * w,
          2 * x, 0, 2 * z,
          -2 * w, 2 * z, -4 * y;
  d[2] << -4 * z, -2 * w, 2 * x,
          2 * w, -4 * z, 2 * y,
          2 * x, 2 * y, 0;
  d[3] << 0, -2 * z, 2 * y,
          2 * z, 0, -2 * x,
          -2 * y, 2 * x, 0;
  return d;
}

/// Constant second partials of the raw rotation formula, index (a,b).
inline const Mat3& rot_second_partial_raw(int a, int b) {
  static const std::array<std::array<Mat3, 4>, 4> table = [] {
    std::array<std::array<Mat3, 4>, 4> t;
    auto set = [&t](int i, int j, std::initializer_list<double> v) {
      Mat3 m;
      auto it = v.begin();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = *it++;
      t[i][j] = m;
      t[j][i] = m;
    };
    set(0, 0, {0, 0, 0, 0, -4, 0, 0, 0, -4});
    set(0, 1, {0, 2, 0, 2, 0, 0, 0, 0, 0});
    set(0, 2, {0, 0, 2, 0, 0, 0, 2, 0, 0});
    set(0, 3, {0, 0, 0, 0, 0, -2, 0, 2, 0});
    set(1, 1, {-4, 0, 0, 0, 0, 0, 0, 0, -4});
    set(1, 2, {0, 0, 0, 0, 0, 2, 0, 2, 0});
    set(1, 3, {0, 0, 2, 0, 0, 0, -2, 0, 0});
    set(2, 2, {-4, 0, 0, 0, -4, 0, 0, 0, 0});
    set(2, 3, {0, -2, 0, 2, 0, 0, 0, 0, 0});
    set(3, 3, {0, 0, 0, 0, 0, 0, 0, 0, 0});
    return t;
  }();
  return table[a][b];
}

}  // namespace detail

/// First partials of xi -> R(xi/|xi|), evaluated at unit xi.
inline std::array<Mat3, 4> rot_partials(const Vec4& xi) {
  const std::array<Mat3, 4> raw = detail::rot_partials_raw(xi);
  const Mat4 proj = Mat4::Identity() - xi * xi.transpose();
  std::array<Mat3, 4> d;
  for (int k = 0; k < 4; ++k) {
    d[k].setZero();
    for (int a = 0; a < 4; ++a) d[k] += raw[a] * proj(a, k);
  }
  return d;
}

/// Second partials of xi -> R(xi/|xi|) at unit xi, as a symmetric 4x4 table
/// of 3x3 matrices.
inline std::array<std::array<Mat3, 4>, 4> rot_second_partials(const Vec4& xi) {
  const std::array<Mat3, 4> raw = detail::rot_partials_raw(xi);
  const Mat4 proj = Mat4::Identity() - xi * xi.transpose();
  std::array<std::array<Mat3, 4>, 4> e;
  for (int k = 0; k < 4; ++k) {
    for (int m = k; m < 4; ++m) {
      Mat3 acc = Mat3::Zero();
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          acc += detail::rot_second_partial_raw(a, b) * (proj(a, k) * proj(b, m));
        }
        // curvature of the normalization map: d^2 n_a / d xi_k d xi_m
        const double n2 = -((a == k) ? xi[m] : 0.0) - ((a == m) ? xi[k] : 0.0) -
                          ((k == m) ? xi[a] : 0.0) + 3.0 * xi[a] * xi[k] * xi[m];
        acc += raw[a] * n2;
      }
      e[k][m] = acc;
      e[m][k] = acc;
    }
  }
  return e;
}

}  // namespace armsafe
