#pragma once

#include <vector>

#include "armsafe/model.hpp"

namespace armsafe {

/// World-frame chain quantities for one arm at a given state. `velocities`
/// (omega/v and the attachment rates) are only valid when the cache was
/// built with a velocity.
struct KinematicsCache {
  // per joint i: world rotation/origin of the joint (= link) frame
  std::vector<Mat3> link_R;
  std::vector<Vec3> link_o;
  std::vector<Vec3> axis_w;   // joint axis in world
  std::vector<Vec3> omega;    // angular velocity of link i
  std::vector<Vec3> v_origin; // linear velocity of joint-i origin

  // per attachment frame
  std::vector<FramePose> frames;
  std::vector<Mat6X> J;     // geometric Jacobian: rows 0-2 linear, 3-5 angular
  std::vector<Mat6X> Jdot;  // analytic time derivative of J
  std::vector<Vec3> frame_v;
  std::vector<Vec3> frame_w;
};

namespace detail {

inline void chain_poses(const RobotModel& model, const VecX& q, KinematicsCache& c) {
  const int n = model.n_joints();
  if (q.size() != n) throw ModelError("chain_poses: q dimension mismatch");
  c.link_R.resize(n);
  c.link_o.resize(n);
  c.axis_w.resize(n);
  Mat3 R = model.base().rotation();
  Vec3 o = model.base().translation;
  for (int i = 0; i < n; ++i) {
    const JointSpec& j = model.joint(i);
    o = o + R * j.origin.translation;
    R = R * j.origin.rotation();
    c.axis_w[i] = R * j.axis;
    R = R * quat_to_rot(quat_from_axis_angle(j.axis, q[i]));
    c.link_R[i] = R;
    c.link_o[i] = o;
  }
}

}  // namespace detail

/// Full kinematics pass: poses always; Jacobians when `with_jacobians`;
/// velocity-dependent terms (Jdot, frame velocities) when `qd` is non-null.
inline KinematicsCache compute_kinematics(const RobotModel& model, const VecX& q,
                                          const VecX* qd = nullptr,
                                          bool with_jacobians = true) {
  KinematicsCache c;
  detail::chain_poses(model, q, c);
  const int n = model.n_joints();
  const int n_frames = static_cast<int>(model.attachments().size());

  if (qd != nullptr) {
    if (qd->size() != n) throw ModelError("compute_kinematics: qd dimension mismatch");
    c.omega.resize(n);
    c.v_origin.resize(n);
    Vec3 w = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 o_prev = model.base().translation;
    for (int i = 0; i < n; ++i) {
      // joint-i origin rides on link i-1
      v = v + w.cross(c.link_o[i] - o_prev);
      c.v_origin[i] = v;
      w = w + c.axis_w[i] * (*qd)[i];
      c.omega[i] = w;
      o_prev = c.link_o[i];
    }
  }

  c.frames.resize(n_frames);
  if (with_jacobians) {
    c.J.assign(n_frames, Mat6X::Zero(6, n));
    if (qd != nullptr) {
      c.Jdot.assign(n_frames, Mat6X::Zero(6, n));
      c.frame_v.resize(n_frames);
      c.frame_w.resize(n_frames);
    }
  }

  for (int f = 0; f < n_frames; ++f) {
    const AttachmentSpec& att = model.attachments()[f];
    const int L = att.link;
    FramePose pose;
    pose.R = c.link_R[L] * att.origin.rotation();
    pose.o = c.link_o[L] + c.link_R[L] * att.origin.translation;
    pose.xi = quat_from_rot(pose.R);
    c.frames[f] = pose;
    if (!with_jacobians) continue;

    for (int m = 0; m <= L; ++m) {
      const Vec3 r = pose.o - c.link_o[m];
      c.J[f].col(m).head<3>() = c.axis_w[m].cross(r);
      c.J[f].col(m).tail<3>() = c.axis_w[m];
    }
    if (qd == nullptr) continue;

    const Vec3 w_f = c.omega[L];
    const Vec3 v_f = c.v_origin[L] + c.omega[L].cross(pose.o - c.link_o[L]);
    c.frame_w[f] = w_f;
    c.frame_v[f] = v_f;
    for (int m = 0; m <= L; ++m) {
      const Vec3 sdot = c.omega[m].cross(c.axis_w[m]);  // axis fixed in link m
      const Vec3 r = pose.o - c.link_o[m];
      const Vec3 rdot = v_f - c.v_origin[m];
      c.Jdot[f].col(m).head<3>() = sdot.cross(r) + c.axis_w[m].cross(rdot);
      c.Jdot[f].col(m).tail<3>() = sdot;
    }
  }
  return c;
}

inline std::vector<FramePose> forward_kinematics(const RobotModel& model, const VecX& q) {
  return compute_kinematics(model, q, nullptr, false).frames;
}

inline Mat6X geometric_jacobian(const RobotModel& model, const VecX& q, int frame) {
  if (frame < 0 || frame >= static_cast<int>(model.attachments().size()))
    throw ModelError("geometric_jacobian: unknown frame");
  return compute_kinematics(model, q).J[frame];
}

inline Mat6X jacobian_time_derivative(const RobotModel& model, const VecX& q,
                                      const VecX& qd, int frame) {
  if (frame < 0 || frame >= static_cast<int>(model.attachments().size()))
    throw ModelError("jacobian_time_derivative: unknown frame");
  return compute_kinematics(model, q, &qd).Jdot[frame];
}

}  // namespace armsafe
