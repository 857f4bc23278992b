#pragma once

#include "armsafe/common.hpp"
#include "armsafe/model.hpp"

namespace armsafe {

/// Ellipsoid expressed in world coordinates: F(p) = (p - c)^T Qw (p - c).
struct WorldEllipsoid {
  Mat3 Qw;
  Vec3 c;

  static WorldEllipsoid from(const Ellipsoid& e, const FramePose& pose) {
    WorldEllipsoid w;
    w.Qw = pose.R * e.Q * pose.R.transpose();
    w.c = pose.o + pose.R * e.mu;
    return w;
  }

  double value(const Vec3& p) const {
    const Vec3 d = p - c;
    return d.dot(Qw * d);
  }

  Vec3 gradient(const Vec3& p) const { return 2.0 * Qw * (p - c); }
};

/// Scaling-function evaluation in the body frame (the defining form).
inline double scaling_value(const Ellipsoid& e, const FramePose& pose, const Vec3& p_world) {
  const Vec3 z = pose.R.transpose() * (p_world - pose.o) - e.mu;
  return z.dot(e.Q * z);
}

}  // namespace armsafe
