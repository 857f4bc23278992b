#pragma once

#include <array>

#include "armsafe/min_scaling.hpp"
#include "armsafe/quat.hpp"

// First and second derivatives of alpha*(theta) for an ellipsoid pair, with
// theta = [o_A, xi_A, o_B, xi_B] in R^14. The gradient is the envelope
// expression d/dtheta [F_A + lambda (F_B - 1)] at fixed (p*, lambda*); the
// Hessian additionally differentiates (p*, lambda*) through the KKT system.

namespace armsafe {

namespace detail {

/// Derivatives of F(p; o, xi) at a point, through the normalized quaternion.
/// Pose block order is (o, xi) -> 7 entries.
struct ScalingDerivs {
  double value;
  Vec3 dp;
  Eigen::Matrix<double, 7, 1> dpose;
  Mat3 dpp;
  Eigen::Matrix<double, 3, 7> dp_dpose;
  Eigen::Matrix<double, 7, 7> dpose2;
};

inline ScalingDerivs scaling_derivs(const Ellipsoid& e, const FramePose& pose,
                                    const Vec3& p, bool second_order) {
  ScalingDerivs out;
  const Mat3& R = pose.R;
  const Vec3 d = p - pose.o;
  const Vec3 z = R.transpose() * d - e.mu;
  const Vec3 w2 = 2.0 * (e.Q * z);

  out.value = z.dot(e.Q * z);
  out.dp = R * w2;
  out.dpose.head<3>() = -out.dp;

  const std::array<Mat3, 4> D = rot_partials(pose.xi);
  std::array<Vec3, 4> Dtd;  // D_k^T d
  for (int k = 0; k < 4; ++k) {
    Dtd[k] = D[k].transpose() * d;
    out.dpose[3 + k] = w2.dot(Dtd[k]);
  }
  if (!second_order) return out;

  out.dpp = 2.0 * (R * e.Q * R.transpose());
  out.dp_dpose.leftCols<3>() = -out.dpp;
  for (int k = 0; k < 4; ++k) {
    out.dp_dpose.col(3 + k) = D[k] * w2 + R * (2.0 * (e.Q * Dtd[k]));
  }

  out.dpose2.topLeftCorner<3, 3>() = out.dpp;
  out.dpose2.block<3, 4>(0, 3) = -out.dp_dpose.rightCols<4>();
  out.dpose2.block<4, 3>(3, 0) = out.dpose2.block<3, 4>(0, 3).transpose();

  const auto E = rot_second_partials(pose.xi);
  for (int k = 0; k < 4; ++k) {
    for (int m = k; m < 4; ++m) {
      const double v =
          2.0 * Dtd[k].dot(e.Q * Dtd[m]) + w2.dot(E[k][m].transpose() * d);
      out.dpose2(3 + k, 3 + m) = v;
      out.dpose2(3 + m, 3 + k) = v;
    }
  }
  return out;
}

}  // namespace detail

/// Envelope-theorem gradient of alpha* w.r.t. theta, at a min_scaling result.
/// Quaternion components are tangential (the radial direction is a gauge).
inline Vec14 grad_alpha(const Ellipsoid& A, const FramePose& pose_A,
                        const Ellipsoid& B, const FramePose& pose_B,
                        const ScalingResult& result) {
  Vec14 g = Vec14::Zero();
  if (result.lambda <= 0.0) return g;  // constraint inactive: alpha* locally 0
  const auto da = detail::scaling_derivs(A, pose_A, result.p, false);
  const auto db = detail::scaling_derivs(B, pose_B, result.p, false);
  g.head<7>() = da.dpose;
  g.tail<7>() = result.lambda * db.dpose;
  return g;
}

/// Hessian of alpha* w.r.t. theta via implicit differentiation of the KKT
/// system in (p*, lambda*). Throws GeometryError on singular KKT Jacobian.
inline Mat14 hess_alpha(const Ellipsoid& A, const FramePose& pose_A,
                        const Ellipsoid& B, const FramePose& pose_B,
                        const ScalingResult& result) {
  if (result.lambda <= 0.0) return Mat14::Zero();
  const auto da = detail::scaling_derivs(A, pose_A, result.p, true);
  const auto db = detail::scaling_derivs(B, pose_B, result.p, true);
  const double lam = result.lambda;

  Mat4 kkt;
  kkt.topLeftCorner<3, 3>() = da.dpp + lam * db.dpp;
  kkt.block<3, 1>(0, 3) = db.dp;
  kkt.block<1, 3>(3, 0) = db.dp.transpose();
  kkt(3, 3) = 0.0;

  Eigen::Matrix<double, 4, 14> rhs = Eigen::Matrix<double, 4, 14>::Zero();
  rhs.block<3, 7>(0, 0) = da.dp_dpose;
  rhs.block<3, 7>(0, 7) = lam * db.dp_dpose;
  rhs.block<1, 7>(3, 7) = db.dpose.transpose();

  Eigen::FullPivLU<Mat4> lu(kkt);
  if (!lu.isInvertible())
    throw GeometryError("hess_alpha: singular KKT system (degenerate tangency)");
  const Eigen::Matrix<double, 4, 14> dy = -lu.solve(rhs);
  const auto p_theta = dy.topRows<3>();
  const auto lambda_theta = dy.row(3);

  Mat14 h = Mat14::Zero();
  h.topLeftCorner<7, 7>() = da.dpose2;
  h.bottomRightCorner<7, 7>() = lam * db.dpose2;

  Eigen::Matrix<double, 14, 3> cross;
  cross.topRows<7>() = da.dp_dpose.transpose();
  cross.bottomRows<7>() = lam * db.dp_dpose.transpose();
  h += cross * p_theta;

  Vec14 dlam_coeff = Vec14::Zero();
  dlam_coeff.tail<7>() = db.dpose;
  h += dlam_coeff * lambda_theta;

  return 0.5 * (h + h.transpose());
}

}  // namespace armsafe
