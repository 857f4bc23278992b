#pragma once

#include "armsafe/common.hpp"
#include "armsafe/model.hpp"
#include "armsafe/quat.hpp"

namespace armsafe {

/// theta = [o_A, xi_A, o_B, xi_B]. Callers wanting continuity across steps
/// must sign-align the quaternions before building theta.
inline Vec14 build_theta(const FramePose& pose_A, const FramePose& pose_B) {
  Vec14 theta;
  theta.segment<3>(0) = pose_A.o;
  theta.segment<4>(3) = pose_A.xi;
  theta.segment<3>(7) = pose_B.o;
  theta.segment<4>(10) = pose_B.xi;
  return theta;
}

inline FramePose pose_from_theta_block(const Vec14& theta, int offset) {
  FramePose pose;
  pose.o = theta.segment<3>(offset);
  pose.xi = quat_normalized(theta.segment<4>(offset + 3));
  pose.R = quat_to_rot(pose.xi);
  return pose;
}

/// Stacked kinematic/dynamic factors of the pairwise chain rule:
/// theta_dot = T Omega qd_ij, with Upsilon = blockdiag(M_i^-1, M_j^-1) and
/// sigma_ij the stacked bias torques.
struct LieWorkspace {
  Eigen::Matrix<double, 14, 12> T = Eigen::Matrix<double, 14, 12>::Zero();
  Eigen::Matrix<double, 14, 12> Tdot = Eigen::Matrix<double, 14, 12>::Zero();
  MatX Omega;     // 12 x (n_i + n_j)
  MatX Omegadot;  // 12 x (n_i + n_j)
  MatX Upsilon;   // (n_i + n_j)^2 block diagonal
  VecX sigma;     // n_i + n_j
  VecX qd;        // n_i + n_j
  Vec14 theta_dot = Vec14::Zero();
};

/// Assembles T, Omega and their time derivatives from the two bodies'
/// Jacobians (rows 0-2 linear, 3-5 angular) and the aligned quaternions.
/// Tdot uses xi_dot = 0.5 Pi(xi) omega and the linearity of Pi in xi.
inline LieWorkspace build_lie_workspace(
    const Vec4& xi_A, const Mat6X& J_A, const Mat6X& Jdot_A, const VecX& qd_i,
    const Vec4& xi_B, const Mat6X& J_B, const Mat6X& Jdot_B, const VecX& qd_j,
    const MatX& Minv_i, const MatX& Minv_j, const VecX& sigma_i, const VecX& sigma_j) {
  const int ni = static_cast<int>(qd_i.size());
  const int nj = static_cast<int>(qd_j.size());
  LieWorkspace w;

  w.T.block<3, 3>(0, 0).setIdentity();
  w.T.block<4, 3>(3, 3) = 0.5 * pi_matrix(xi_A);
  w.T.block<3, 3>(7, 6).setIdentity();
  w.T.block<4, 3>(10, 9) = 0.5 * pi_matrix(xi_B);

  const Vec3 omega_A = J_A.bottomRows<3>() * qd_i;
  const Vec3 omega_B = J_B.bottomRows<3>() * qd_j;
  const Vec4 xi_dot_A = 0.5 * pi_matrix(xi_A) * omega_A;
  const Vec4 xi_dot_B = 0.5 * pi_matrix(xi_B) * omega_B;
  w.Tdot.block<4, 3>(3, 3) = 0.5 * pi_matrix(xi_dot_A);
  w.Tdot.block<4, 3>(10, 9) = 0.5 * pi_matrix(xi_dot_B);

  w.Omega = MatX::Zero(12, ni + nj);
  w.Omega.block(0, 0, 6, ni) = J_A;
  w.Omega.block(6, ni, 6, nj) = J_B;
  w.Omegadot = MatX::Zero(12, ni + nj);
  w.Omegadot.block(0, 0, 6, ni) = Jdot_A;
  w.Omegadot.block(6, ni, 6, nj) = Jdot_B;

  w.Upsilon = MatX::Zero(ni + nj, ni + nj);
  w.Upsilon.topLeftCorner(ni, ni) = Minv_i;
  w.Upsilon.bottomRightCorner(nj, nj) = Minv_j;

  w.sigma = VecX(ni + nj);
  w.sigma.head(ni) = sigma_i;
  w.sigma.tail(nj) = sigma_j;
  w.qd = VecX(ni + nj);
  w.qd.head(ni) = qd_i;
  w.qd.tail(nj) = qd_j;

  w.theta_dot = w.T * (w.Omega * w.qd);
  return w;
}

/// theta_dot from raw factors (Eq. form theta_dot = T Omega qd).
inline Vec14 theta_dot(const Vec4& xi_A, const Mat6X& J_A, const VecX& qd_i,
                       const Vec4& xi_B, const Mat6X& J_B, const VecX& qd_j) {
  Vec14 td;
  const Vec6 twist_A = J_A * qd_i;
  const Vec6 twist_B = J_B * qd_j;
  td.segment<3>(0) = twist_A.head<3>();
  td.segment<4>(3) = 0.5 * pi_matrix(xi_A) * twist_A.tail<3>();
  td.segment<3>(7) = twist_B.head<3>();
  td.segment<4>(10) = 0.5 * pi_matrix(xi_B) * twist_B.tail<3>();
  return td;
}

}  // namespace armsafe
