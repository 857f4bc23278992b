#pragma once

// Finite-difference oracles over theta for the minimum-scaling derivatives.
// Quaternion coordinates are perturbed in the tangent space and renormalized,
// matching the gauge of the analytic derivatives.

#include "armsafe/alpha_derivatives.hpp"
#include "armsafe/theta.hpp"
#include "oracles.hpp"

namespace geometry_fd {

using namespace armsafe;

struct PairInstance {
  Ellipsoid body_a, body_b;
  FramePose pose_a, pose_b;

  Vec14 theta() const { return build_theta(pose_a, pose_b); }
};

inline PairInstance random_pair(double min_sep = 2.2, double max_sep = 6.0) {
  PairInstance p;
  auto random_body = [] {
    Ellipsoid e;
    const Vec3 axes(oracles::uniform(0.5, 1.5), oracles::uniform(0.5, 1.5),
                    oracles::uniform(0.5, 1.5));
    e.Q = Vec3(1 / (axes[0] * axes[0]), 1 / (axes[1] * axes[1]),
               1 / (axes[2] * axes[2]))
              .asDiagonal();
    e.mu = oracles::random_vec3(0.3);
    return e;
  };
  p.body_a = random_body();
  p.body_b = random_body();
  p.pose_a.o = oracles::random_vec3(0.5);
  p.pose_a.xi = oracles::random_unit_quat();
  p.pose_a.R = quat_to_rot(p.pose_a.xi);
  const Vec3 dir = oracles::random_vec3(1.0).normalized();
  p.pose_b.o = p.pose_a.o + oracles::uniform(min_sep, max_sep) * dir;
  p.pose_b.xi = oracles::random_unit_quat();
  p.pose_b.R = quat_to_rot(p.pose_b.xi);
  return p;
}

inline double alpha_at(const PairInstance& p, const Vec14& theta, double tol = 1e-12) {
  const FramePose pa = pose_from_theta_block(theta, 0);
  const FramePose pb = pose_from_theta_block(theta, 7);
  return min_scaling(p.body_a, pa, p.body_b, pb, tol).alpha;
}

inline Vec14 grad_at(const PairInstance& p, const Vec14& theta, double tol = 1e-12) {
  const FramePose pa = pose_from_theta_block(theta, 0);
  const FramePose pb = pose_from_theta_block(theta, 7);
  const ScalingResult res = min_scaling(p.body_a, pa, p.body_b, pb, tol);
  return grad_alpha(p.body_a, pa, p.body_b, pb, res);
}

/// Tangent-space perturbation directions: coordinate axes for positions,
/// projected axes for quaternion blocks.
inline Vec14 tangent_direction(const Vec14& theta, int coord) {
  Vec14 v = Vec14::Zero();
  v[coord] = 1.0;
  if (coord >= 3 && coord < 7) {
    const Vec4 xi = theta.segment<4>(3);
    v.segment<4>(3) -= xi * xi.dot(v.segment<4>(3));
  } else if (coord >= 10) {
    const Vec4 xi = theta.segment<4>(10);
    v.segment<4>(10) -= xi * xi.dot(v.segment<4>(10));
  }
  return v;
}

inline double fd_grad_error(const PairInstance& p, double eps = 1e-5) {
  const Vec14 theta = p.theta();
  const ScalingResult res = min_scaling(p.body_a, p.pose_a, p.body_b, p.pose_b, 1e-12);
  const Vec14 g = grad_alpha(p.body_a, p.pose_a, p.body_b, p.pose_b, res);
  double worst = 0.0;
  for (int k = 0; k < 14; ++k) {
    const Vec14 v = tangent_direction(theta, k);
    if (v.norm() < 1e-12) continue;
    const double fd =
        (alpha_at(p, theta + eps * v) - alpha_at(p, theta - eps * v)) / (2 * eps);
    const double ref = std::max(1.0, g.cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(fd - g.dot(v)) / ref);
  }
  return worst;
}

inline double fd_hess_error(const PairInstance& p, double eps = 1e-5) {
  const Vec14 theta = p.theta();
  const ScalingResult res = min_scaling(p.body_a, p.pose_a, p.body_b, p.pose_b, 1e-12);
  const Mat14 h = hess_alpha(p.body_a, p.pose_a, p.body_b, p.pose_b, res);
  double worst = 0.0;
  const double ref = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (int k = 0; k < 14; ++k) {
    const Vec14 v = tangent_direction(theta, k);
    if (v.norm() < 1e-12) continue;
    const Vec14 fd =
        (grad_at(p, theta + eps * v) - grad_at(p, theta - eps * v)) / (2 * eps);
    worst = std::max(worst, (fd - h * v).cwiseAbs().maxCoeff() / ref);
  }
  return worst;
}

}  // namespace geometry_fd
