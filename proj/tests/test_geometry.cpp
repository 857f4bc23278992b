#include <catch2/catch_amalgamated.hpp>

#include "armsafe/alpha_derivatives.hpp"
#include "armsafe/min_scaling.hpp"
#include "geometry_fd.hpp"
#include "oracles.hpp"

using namespace armsafe;

namespace {

Ellipsoid unit_sphere() {
  Ellipsoid e;
  e.Q = Mat3::Identity();
  return e;
}

FramePose pose_at(const Vec3& o, const Vec4& xi = quat_identity()) {
  FramePose p;
  p.o = o;
  p.xi = xi;
  p.R = quat_to_rot(xi);
  return p;
}

/// Sampling-based disjointness check, independent of min_scaling: draw points
/// of body B (uniform in its parameter ball) and test membership in A.
bool bodies_intersect_sampling(const WorldEllipsoid& A, const WorldEllipsoid& B) {
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(B.Qw);
  const Mat3 to_world =
      eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  for (int i = 0; i < 20000; ++i) {
    Vec3 s = oracles::random_vec3(1.0);
    if (s.norm() > 1.0) s /= s.norm();
    const Vec3 p = B.c + to_world * s;
    if (A.value(p) <= 1.0) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("scaling_value: sphere boundary and quadratic growth") {
  const Ellipsoid s = unit_sphere();
  const FramePose origin = pose_at(Vec3::Zero());
  CHECK(scaling_value(s, origin, Vec3(1, 0, 0)) == Catch::Approx(1.0));
  CHECK(scaling_value(s, origin, Vec3(2, 0, 0)) == Catch::Approx(4.0));
}

TEST_CASE("scaling_value: invariant under a common rotation") {
  for (int trial = 0; trial < 20; ++trial) {
    Ellipsoid e;
    e.Q = Vec3(1.0, 4.0, 0.25).asDiagonal();
    e.mu = Vec3(0.1, -0.2, 0.05);
    const FramePose pose = pose_at(oracles::random_vec3(1.0), oracles::random_unit_quat());
    const Vec3 p = oracles::random_vec3(2.0);
    const double base = scaling_value(e, pose, p);

    const Vec4 rot = oracles::random_unit_quat();
    const Mat3 r = quat_to_rot(rot);
    FramePose moved;
    moved.o = r * pose.o;
    moved.xi = quat_mul(rot, pose.xi);
    moved.R = quat_to_rot(moved.xi);
    CHECK(scaling_value(e, moved, r * p) == Catch::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("min_scaling: collinear unit spheres") {
  const Ellipsoid s = unit_sphere();
  const ScalingResult res =
      min_scaling(s, pose_at(Vec3::Zero()), s, pose_at(Vec3(3, 0, 0)));
  CHECK(res.alpha == Catch::Approx(4.0).margin(1e-8));
  CHECK((res.p - Vec3(2, 0, 0)).norm() < 1e-8);
  CHECK(res.lambda == Catch::Approx(2.0).margin(1e-7));

  const ScalingResult touching =
      min_scaling(s, pose_at(Vec3::Zero()), s, pose_at(Vec3(2, 0, 0)));
  CHECK(touching.alpha == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("min_scaling: KKT invariants on random pairs") {
  for (int trial = 0; trial < 100; ++trial) {
    const auto pair = geometry_fd::random_pair();
    const ScalingResult res =
        min_scaling(pair.body_a, pair.pose_a, pair.body_b, pair.pose_b);
    const WorldEllipsoid A = WorldEllipsoid::from(pair.body_a, pair.pose_a);
    const WorldEllipsoid B = WorldEllipsoid::from(pair.body_b, pair.pose_b);
    CHECK(std::abs(B.value(res.p) - 1.0) < 1e-9);
    CHECK(std::abs(A.value(res.p) - res.alpha) < 1e-9 * std::max(1.0, res.alpha));
    CHECK((A.gradient(res.p) + res.lambda * B.gradient(res.p)).norm() <
          1e-7 * std::max(1.0, A.gradient(res.p).norm()));
    CHECK(res.lambda >= 0.0);
  }
}

TEST_CASE("min_scaling matches projected-gradient brute force") {
  for (int trial = 0; trial < 40; ++trial) {
    const auto pair = geometry_fd::random_pair(1.2, 5.0);
    const WorldEllipsoid A = WorldEllipsoid::from(pair.body_a, pair.pose_a);
    const WorldEllipsoid B = WorldEllipsoid::from(pair.body_b, pair.pose_b);
    const double ours = min_scaling_world(A, B).alpha;
    const double brute = oracles::min_scaling_brute_force(A, B);
    CHECK(std::abs(ours - brute) < 1e-6 * std::max(1.0, std::abs(brute)));
  }
}

TEST_CASE("min_scaling: overlap conventions") {
  const Ellipsoid s = unit_sphere();
  // overlapping but centers outside each other: alpha in (0, 1)
  const ScalingResult shallow =
      min_scaling(s, pose_at(Vec3::Zero()), s, pose_at(Vec3(1.5, 0, 0)));
  CHECK(shallow.alpha < 1.0);
  CHECK(shallow.alpha > 0.0);
  // center of A inside B: constraint inactive, alpha = 0
  const ScalingResult deep =
      min_scaling(s, pose_at(Vec3::Zero()), s, pose_at(Vec3(0.5, 0, 0)));
  CHECK(deep.alpha == 0.0);
  CHECK(deep.lambda == 0.0);
}

TEST_CASE("alpha > 1 iff bodies disjoint (sampling oracle)") {
  int disjoint_seen = 0, overlap_seen = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto pair = geometry_fd::random_pair(1.0, 4.5);
    const WorldEllipsoid A = WorldEllipsoid::from(pair.body_a, pair.pose_a);
    const WorldEllipsoid B = WorldEllipsoid::from(pair.body_b, pair.pose_b);
    const double alpha = min_scaling_world(A, B).alpha;
    if (std::abs(alpha - 1.0) < 1e-3) continue;  // sampling can't resolve tangency
    const bool hit = bodies_intersect_sampling(A, B);
    if (alpha > 1.0) {
      CHECK_FALSE(hit);
      ++disjoint_seen;
    } else {
      CHECK(hit);
      ++overlap_seen;
    }
  }
  CHECK(disjoint_seen > 0);
  CHECK(overlap_seen > 0);
}

TEST_CASE("min_scaling: invariant under common rigid motion; swap keeps sign") {
  for (int trial = 0; trial < 25; ++trial) {
    const auto pair = geometry_fd::random_pair(1.3, 5.0);
    const double alpha =
        min_scaling(pair.body_a, pair.pose_a, pair.body_b, pair.pose_b).alpha;

    const Vec4 rot = oracles::random_unit_quat();
    const Mat3 r = quat_to_rot(rot);
    const Vec3 shift = oracles::random_vec3(2.0);
    auto move = [&](const FramePose& p) {
      FramePose out;
      out.o = r * p.o + shift;
      out.xi = quat_mul(rot, p.xi);
      out.R = quat_to_rot(out.xi);
      return out;
    };
    const double moved = min_scaling(pair.body_a, move(pair.pose_a), pair.body_b,
                                     move(pair.pose_b))
                             .alpha;
    CHECK(moved == Catch::Approx(alpha).epsilon(1e-9));

    const double swapped =
        min_scaling(pair.body_b, pair.pose_b, pair.body_a, pair.pose_a).alpha;
    CHECK(((alpha > 1.0) == (swapped > 1.0)));
  }
}

TEST_CASE("grad_alpha: sphere-sphere closed-form entries") {
  const Ellipsoid s = unit_sphere();
  const FramePose pa = pose_at(Vec3::Zero());
  const FramePose pb = pose_at(Vec3(3, 0, 0), oracles::random_unit_quat());
  const ScalingResult res = min_scaling(s, pa, s, pb);
  const Vec14 g = grad_alpha(s, pa, s, pb, res);
  CHECK(g[7] == Catch::Approx(4.0).margin(1e-7));   // d alpha / d o_B,x
  CHECK(g[0] == Catch::Approx(-4.0).margin(1e-7));  // d alpha / d o_A,x
  // spheres are rotation-symmetric: quaternion blocks vanish
  CHECK(g.segment<4>(3).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(g.segment<4>(10).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("grad_alpha matches tangent-space finite differences") {
  for (int trial = 0; trial < 40; ++trial) {
    const auto pair = geometry_fd::random_pair();
    CHECK(geometry_fd::fd_grad_error(pair) < 1e-5);
  }
}

TEST_CASE("hess_alpha: sphere-sphere second derivative and symmetry") {
  const Ellipsoid s = unit_sphere();
  const FramePose pa = pose_at(Vec3::Zero());
  const FramePose pb = pose_at(Vec3(3, 0, 0));
  const ScalingResult res = min_scaling(s, pa, s, pb);
  const Mat14 h = hess_alpha(s, pa, s, pb, res);
  CHECK(h(7, 7) == Catch::Approx(2.0).margin(1e-6));
  CHECK(h(0, 0) == Catch::Approx(2.0).margin(1e-6));
  CHECK(h(0, 7) == Catch::Approx(-2.0).margin(1e-6));
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("hess_alpha matches finite differences of grad_alpha") {
  for (int trial = 0; trial < 25; ++trial) {
    const auto pair = geometry_fd::random_pair();
    CHECK(geometry_fd::fd_hess_error(pair) < 1e-4);
  }
}
