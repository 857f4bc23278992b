#pragma once

#include <string>
#include <utility>
#include <vector>

#include "armsafe/common.hpp"
#include "armsafe/quat.hpp"

namespace armsafe {

/// Rigid transform as translation + unit quaternion (x,y,z,w).
struct Pose {
  Vec3 translation = Vec3::Zero();
  Vec4 quaternion = quat_identity();

  Mat3 rotation() const { return quat_to_rot(quat_normalized(quaternion)); }
};

/// One revolute joint and the link rigidly attached to it. The joint frame
/// equals the link frame; `origin` is the fixed transform from the parent
/// link frame, `axis` the rotation axis in the joint frame.
struct JointSpec {
  std::string name;
  Pose origin;
  Vec3 axis = Vec3::UnitZ();
  double mass = 1.0;
  Vec3 com = Vec3::Zero();            // center of mass, link frame
  Mat3 inertia = Mat3::Identity();    // about the com, link frame
  double viscous_friction = 0.1;      // N*m*s/rad
  double q_lo = -3.0, q_hi = 3.0;
  double qd_lo = -2.0, qd_hi = 2.0;
  double u_lo = -50.0, u_hi = 50.0;
};

/// Named frame rigidly attached to a link; collision bodies anchor here.
struct AttachmentSpec {
  std::string name;
  int link = 0;  // joint/link index the frame rides on
  Pose origin;   // link-frame transform
};

/// Ellipsoid collision body: F(p) = (R_bw (p - o) - mu)^T Q (R_bw (p - o) - mu),
/// with (o, R) the world pose of the attachment frame.
struct Ellipsoid {
  Mat3 Q = Mat3::Identity();  // symmetric positive definite, 1/m^2
  Vec3 mu = Vec3::Zero();     // center offset in the attachment frame
  int attachment = 0;         // index into the model's attachment list
};

struct RobotState {
  VecX q;
  VecX qd;

  static RobotState zero(int n) {
    RobotState s;
    s.q = VecX::Zero(n);
    s.qd = VecX::Zero(n);
    return s;
  }
};

struct DynamicsTerms {
  MatX M;      // mass matrix
  VecX sigma;  // Coriolis/centrifugal + friction + gravity torques
};

struct FramePose {
  Vec3 o = Vec3::Zero();       // origin in world
  Vec4 xi = quat_identity();   // world<-body quaternion (x,y,z,w)
  Mat3 R = Mat3::Identity();   // world<-body rotation
};

/// Immutable description of one serial arm. Construct via `make` so the
/// invariants are checked once; afterwards all queries are read-only and
/// thread-safe.
class RobotModel {
 public:
  static RobotModel make(std::string name, Pose base, Vec3 gravity,
                         std::vector<JointSpec> joints,
                         std::vector<AttachmentSpec> attachments,
                         std::vector<Ellipsoid> ellipsoids) {
    RobotModel m;
    m.name_ = std::move(name);
    m.base_ = base;
    m.gravity_ = gravity;
    m.joints_ = std::move(joints);
    m.attachments_ = std::move(attachments);
    m.ellipsoids_ = std::move(ellipsoids);
    m.validate();
    return m;
  }

  const std::string& name() const { return name_; }
  int n_joints() const { return static_cast<int>(joints_.size()); }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const JointSpec& joint(int i) const { return joints_.at(i); }
  const Pose& base() const { return base_; }
  const Vec3& gravity() const { return gravity_; }
  const std::vector<AttachmentSpec>& attachments() const { return attachments_; }
  const std::vector<Ellipsoid>& ellipsoids() const { return ellipsoids_; }

  int attachment_index(const std::string& name) const {
    for (size_t i = 0; i < attachments_.size(); ++i) {
      if (attachments_[i].name == name) return static_cast<int>(i);
    }
    throw ModelError("unknown attachment frame: " + name);
  }

  VecX q_lower() const { return collect(&JointSpec::q_lo); }
  VecX q_upper() const { return collect(&JointSpec::q_hi); }
  VecX qd_lower() const { return collect(&JointSpec::qd_lo); }
  VecX qd_upper() const { return collect(&JointSpec::qd_hi); }
  VecX u_lower() const { return collect(&JointSpec::u_lo); }
  VecX u_upper() const { return collect(&JointSpec::u_hi); }

  /// Model with a different base mount (used when placing robots in a world).
  RobotModel with_base(const Pose& base) const {
    RobotModel m = *this;
    m.base_ = base;
    return m;
  }

 private:
  VecX collect(double JointSpec::* field) const {
    VecX v(n_joints());
    for (int i = 0; i < n_joints(); ++i) v[i] = joints_[i].*field;
    return v;
  }

  void validate() const {
    if (joints_.empty()) throw ModelError(name_ + ": model has no joints");
    for (const JointSpec& j : joints_) {
      if (!(j.mass > 0.0)) throw ModelError(j.name + ": mass must be positive");
      if (std::abs(j.axis.norm() - 1.0) > 1e-9)
        throw ModelError(j.name + ": joint axis must be unit-norm");
      if ((j.inertia - j.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ModelError(j.name + ": inertia must be symmetric");
      Eigen::SelfAdjointEigenSolver<Mat3> eig(j.inertia);
      if (eig.eigenvalues().minCoeff() < -1e-12)
        throw ModelError(j.name + ": inertia must be positive semidefinite");
      if (!(j.q_lo < j.q_hi)) throw ModelError(j.name + ": q limits out of order");
      if (!(j.qd_lo < 0.0 && 0.0 < j.qd_hi))
        throw ModelError(j.name + ": velocity limits must straddle zero");
      if (!(j.u_lo < 0.0 && 0.0 < j.u_hi))
        throw ModelError(j.name + ": torque limits must straddle zero");
    }
    for (const AttachmentSpec& a : attachments_) {
      if (a.link < 0 || a.link >= n_joints())
        throw ModelError(a.name + ": attachment link out of range");
    }
    for (const Ellipsoid& e : ellipsoids_) {
      if (e.attachment < 0 || e.attachment >= static_cast<int>(attachments_.size()))
        throw ModelError(name_ + ": ellipsoid attachment out of range");
      if ((e.Q - e.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ModelError(name_ + ": ellipsoid Q must be symmetric");
      Eigen::SelfAdjointEigenSolver<Mat3> eig(e.Q);
      if (eig.eigenvalues().minCoeff() <= 0.0)
        throw ModelError(name_ + ": ellipsoid Q must be positive definite");
    }
  }

  std::string name_;
  Pose base_;
  Vec3 gravity_ = Vec3(0.0, 0.0, -9.81);
  std::vector<JointSpec> joints_;
  std::vector<AttachmentSpec> attachments_;
  std::vector<Ellipsoid> ellipsoids_;
};

}  // namespace armsafe
