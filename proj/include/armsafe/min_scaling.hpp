#pragma once

#include <algorithm>
#include <cmath>

#include "armsafe/ellipsoid.hpp"

namespace armsafe {

/// Solution of the minimum-scaling problem
///   alpha*(theta) = min_p F_A(p)  s.t.  F_B(p) <= 1.
/// alpha* > 1 iff the bodies are disjoint. `grad` is filled by grad_alpha.
struct ScalingResult {
  double alpha = 0.0;
  Vec3 p = Vec3::Zero();        // witness point
  double lambda = 0.0;          // KKT multiplier of the F_B constraint
  Vec14 grad = Vec14::Zero();
  bool has_grad = false;
};

namespace detail {

/// Stationary point of F_A + lambda F_B along the KKT path:
/// p(lambda) = (QA + lambda QB)^-1 (QA cA + lambda QB cB).
inline Vec3 kkt_path_point(const WorldEllipsoid& A, const WorldEllipsoid& B,
                           double lambda) {
  const Mat3 K = A.Qw + lambda * B.Qw;
  return K.ldlt().solve(A.Qw * A.c + lambda * (B.Qw * B.c));
}

}  // namespace detail

/// Solves the minimum-scaling problem for two world-posed ellipsoids.
/// F_B(p(lambda)) is strictly decreasing along the KKT path from F_B(cA) at
/// lambda=0 to 0 as lambda -> inf, so the active-constraint case has a unique
/// bracketed root; bisection-safeguarded Newton drives |F_B - 1| <= tol.
/// When F_B(cA) <= 1 the constraint is inactive and alpha* = F_A(cA) = 0
/// (overlapping bodies yield alpha* < 1, not an error).
inline ScalingResult min_scaling_world(const WorldEllipsoid& A, const WorldEllipsoid& B,
                                       double tol = 1e-10, int max_iter = 200) {
  ScalingResult res;
  const double fb_at_ca = B.value(A.c);
  if (fb_at_ca <= 1.0) {
    res.alpha = 0.0;
    res.p = A.c;
    res.lambda = 0.0;
    return res;
  }

  // bracket [lo, hi] with g(lo) > 0 > g(hi), g(lambda) = F_B(p(lambda)) - 1
  double lo = 0.0;
  double g_lo = fb_at_ca - 1.0;
  double hi = 1.0;
  double g_hi = B.value(detail::kkt_path_point(A, B, hi)) - 1.0;
  int grow = 0;
  while (g_hi > 0.0) {
    lo = hi;
    g_lo = g_hi;
    hi *= 4.0;
    g_hi = B.value(detail::kkt_path_point(A, B, hi)) - 1.0;
    if (++grow > 60) throw GeometryError("min_scaling: failed to bracket root", lo, hi);
  }

  double lambda = 0.5 * (lo + hi);
  Vec3 p = detail::kkt_path_point(A, B, lambda);
  double g = B.value(p) - 1.0;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(g) <= tol) {
      res.alpha = A.value(p);
      res.p = p;
      res.lambda = lambda;
      return res;
    }
    if (g > 0.0) {
      lo = lambda;
      g_lo = g;
    } else {
      hi = lambda;
      g_hi = g;
    }
    // Newton step on g; fall back to bisection when it leaves the bracket
    const Mat3 K = A.Qw + lambda * B.Qw;
    const Vec3 db = B.Qw * (p - B.c);
    const Vec3 dp_dlambda = -K.ldlt().solve(db);
    const double dg = 2.0 * db.dot(dp_dlambda);
    double next = lambda - g / dg;
    if (!(dg < 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lambda = next;
    p = detail::kkt_path_point(A, B, lambda);
    g = B.value(p) - 1.0;
  }
  throw GeometryError("min_scaling: root find did not converge", lo, hi);
}

inline ScalingResult min_scaling(const Ellipsoid& A, const FramePose& pose_A,
                                 const Ellipsoid& B, const FramePose& pose_B,
                                 double tol = 1e-10) {
  return min_scaling_world(WorldEllipsoid::from(A, pose_A),
                           WorldEllipsoid::from(B, pose_B), tol);
}

}  // namespace armsafe
