#pragma once

#include <vector>

#include "armsafe/kinematics.hpp"
#include "armsafe/model.hpp"

namespace armsafe {

struct RneaOptions {
  bool gravity = true;
  bool friction = true;
};

/// Recursive Newton-Euler inverse dynamics in world coordinates:
/// returns u = M(q) qdd + D(q,qd) qd + F(qd) + g(q).
inline VecX rnea(const RobotModel& model, const VecX& q, const VecX& qd,
                 const VecX& qdd, const RneaOptions& opt = {}) {
  const int n = model.n_joints();
  if (q.size() != n || qd.size() != n || qdd.size() != n)
    throw ModelError("rnea: dimension mismatch");

  KinematicsCache kin;
  detail::chain_poses(model, q, kin);
  const Vec3 g = opt.gravity ? model.gravity() : Vec3::Zero();

  std::vector<Vec3> w(n), wd(n), a(n);     // link angular vel/acc, origin lin acc
  std::vector<Vec3> f_com(n), n_com(n), p_com(n);
  Vec3 w_prev = Vec3::Zero(), wd_prev = Vec3::Zero(), a_prev = Vec3::Zero();
  Vec3 o_prev = model.base().translation;
  for (int i = 0; i < n; ++i) {
    const Vec3 r = kin.link_o[i] - o_prev;
    const Vec3 a_origin =
        a_prev + wd_prev.cross(r) + w_prev.cross(w_prev.cross(r));
    const Vec3& s = kin.axis_w[i];
    w[i] = w_prev + s * qd[i];
    wd[i] = wd_prev + s * qdd[i] + w_prev.cross(s) * qd[i];
    a[i] = a_origin;

    const JointSpec& jnt = model.joint(i);
    p_com[i] = kin.link_o[i] + kin.link_R[i] * jnt.com;
    const Vec3 rc = p_com[i] - kin.link_o[i];
    const Vec3 a_com = a[i] + wd[i].cross(rc) + w[i].cross(w[i].cross(rc));
    const Mat3 I_w = kin.link_R[i] * jnt.inertia * kin.link_R[i].transpose();
    f_com[i] = jnt.mass * (a_com - g);
    n_com[i] = I_w * wd[i] + w[i].cross(I_w * w[i]);

    w_prev = w[i];
    wd_prev = wd[i];
    a_prev = a[i];
    o_prev = kin.link_o[i];
  }

  VecX u(n);
  Vec3 f_child = Vec3::Zero(), n_child = Vec3::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Vec3 rc = p_com[i] - kin.link_o[i];
    Vec3 n_joint = n_com[i] + rc.cross(f_com[i]) + n_child;
    if (i + 1 < n) n_joint += (kin.link_o[i + 1] - kin.link_o[i]).cross(f_child);
    const Vec3 f_joint = f_com[i] + f_child;
    u[i] = kin.axis_w[i].dot(n_joint);
    if (opt.friction) u[i] += model.joint(i).viscous_friction * qd[i];
    f_child = f_joint;
    n_child = n_joint;
  }
  return u;
}

inline VecX inverse_dynamics(const RobotModel& model, const VecX& q, const VecX& qd,
                             const VecX& qdd) {
  return rnea(model, q, qd, qdd);
}

/// Column-wise mass matrix: M e_k = rnea(q, 0, e_k) without gravity/friction.
inline MatX mass_matrix(const RobotModel& model, const VecX& q) {
  const int n = model.n_joints();
  MatX M(n, n);
  const VecX zero = VecX::Zero(n);
  RneaOptions opt;
  opt.gravity = false;
  opt.friction = false;
  VecX e = VecX::Zero(n);
  for (int k = 0; k < n; ++k) {
    e[k] = 1.0;
    M.col(k) = rnea(model, q, zero, e, opt);
    e[k] = 0.0;
  }
  return M;
}

inline VecX bias_terms(const RobotModel& model, const VecX& q, const VecX& qd) {
  return rnea(model, q, qd, VecX::Zero(model.n_joints()));
}

inline DynamicsTerms compute_dynamics(const RobotModel& model, const VecX& q,
                                      const VecX& qd) {
  return DynamicsTerms{mass_matrix(model, q), bias_terms(model, q, qd)};
}

inline VecX forward_dynamics(const RobotModel& model, const VecX& q, const VecX& qd,
                             const VecX& u) {
  const DynamicsTerms dyn = compute_dynamics(model, q, qd);
  Eigen::LDLT<MatX> ldlt(dyn.M);
  if (ldlt.info() != Eigen::Success)
    throw ModelError("forward_dynamics: mass matrix factorization failed");
  return ldlt.solve(u - dyn.sigma);
}

/// Total mechanical energy (kinetic + gravity potential), for drift checks.
inline double mechanical_energy(const RobotModel& model, const VecX& q, const VecX& qd) {
  const MatX M = mass_matrix(model, q);
  double e = 0.5 * qd.dot(M * qd);
  KinematicsCache kin;
  detail::chain_poses(model, q, kin);
  for (int i = 0; i < model.n_joints(); ++i) {
    const Vec3 p_com = kin.link_o[i] + kin.link_R[i] * model.joint(i).com;
    e -= model.joint(i).mass * model.gravity().dot(p_com);
  }
  return e;
}

}  // namespace armsafe
