#include <catch2/catch_amalgamated.hpp>

#include "armsafe/kinematics.hpp"
#include "armsafe/models_builtin.hpp"
#include "oracles.hpp"

using namespace armsafe;

namespace {

/// Planar arm with point masses at the link tips; link lengths given.
RobotModel make_planar_chain(const std::vector<double>& lengths) {
  std::vector<JointSpec> joints(lengths.size());
  for (size_t i = 0; i < lengths.size(); ++i) {
    JointSpec& j = joints[i];
    j.name = "j" + std::to_string(i);
    j.origin.translation = (i == 0) ? Vec3::Zero() : Vec3(lengths[i - 1], 0, 0);
    j.axis = Vec3::UnitZ();
    j.mass = 1.0;
    j.com = Vec3(lengths[i], 0, 0);
    j.inertia = Mat3::Zero();
    j.viscous_friction = 0.0;
    j.q_lo = -3.1; j.q_hi = 3.1;
  }
  std::vector<AttachmentSpec> atts(1);
  atts[0].name = "tip";
  atts[0].link = static_cast<int>(lengths.size()) - 1;
  atts[0].origin.translation = Vec3(lengths.back(), 0, 0);
  return RobotModel::make("planar_chain", Pose{}, Vec3(0, 0, -9.81),
                          std::move(joints), std::move(atts), {});
}

}  // namespace

TEST_CASE("forward kinematics: straight two-link chain") {
  const RobotModel arm = make_planar_chain({1.0, 1.0});
  VecX q = VecX::Zero(2);
  auto frames = forward_kinematics(arm, q);
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].o.isApprox(Vec3(2, 0, 0), 1e-14));

  q << M_PI / 2, 0.0;
  frames = forward_kinematics(arm, q);
  CHECK((frames[0].o - Vec3(0, 2, 0)).norm() < 1e-12);
}

TEST_CASE("forward kinematics: frame pose invariants") {
  const RobotModel arm = builtin_arm7();
  for (int trial = 0; trial < 20; ++trial) {
    VecX q(7);
    for (int i = 0; i < 7; ++i)
      q[i] = oracles::uniform(arm.joint(i).q_lo, arm.joint(i).q_hi);
    for (const FramePose& f : forward_kinematics(arm, q)) {
      CHECK(std::abs(f.xi.norm() - 1.0) < 1e-9);
      CHECK((f.R * f.R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(f.R.determinant() == Catch::Approx(1.0).margin(1e-12));
      CHECK((quat_to_rot(f.xi) - f.R).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("forward kinematics matches homogeneous-transform oracle") {
  RobotModel arm = builtin_arm7();
  Pose base;
  base.translation = Vec3(0.3, -0.2, 0.1);
  base.quaternion = quat_from_axis_angle(Vec3(1, 2, 3).normalized(), 0.7);
  arm = arm.with_base(base);
  for (int trial = 0; trial < 50; ++trial) {
    VecX q(7);
    for (int i = 0; i < 7; ++i)
      q[i] = oracles::uniform(arm.joint(i).q_lo, arm.joint(i).q_hi);
    const auto frames = forward_kinematics(arm, q);
    for (size_t f = 0; f < frames.size(); ++f) {
      const Vec3 expect = oracles::fk_frame_origin(arm, q, static_cast<int>(f));
      CHECK((frames[f].o - expect).norm() < 1e-12);
    }
  }
}

TEST_CASE("forward kinematics rejects dimension mismatch") {
  const RobotModel arm = builtin_planar3();
  CHECK_THROWS_AS(forward_kinematics(arm, VecX::Zero(5)), ModelError);
  CHECK_THROWS_AS(geometric_jacobian(arm, VecX::Zero(3), 99), ModelError);
}

TEST_CASE("geometric jacobian: planar closed form") {
  const RobotModel arm = make_planar_chain({1.0, 1.0});
  const Mat6X j = geometric_jacobian(arm, VecX::Zero(2), 0);
  // linear x row is zero, y row is (2, 1); angular z row is (1, 1)
  CHECK(j(0, 0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(j(0, 1) == Catch::Approx(0.0).margin(1e-14));
  CHECK(j(1, 0) == Catch::Approx(2.0));
  CHECK(j(1, 1) == Catch::Approx(1.0));
  CHECK(j(5, 0) == Catch::Approx(1.0));
  CHECK(j(5, 1) == Catch::Approx(1.0));
}

TEST_CASE("geometric jacobian: columns beyond the supporting joint vanish") {
  const RobotModel arm = builtin_arm7();
  VecX q(7);
  for (int i = 0; i < 7; ++i) q[i] = oracles::uniform(-1.5, 1.5);
  // attachment 0 rides on link 3, so columns 4..6 must be zero
  const Mat6X j = geometric_jacobian(arm, q, 0);
  CHECK(j.rightCols(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("geometric jacobian matches finite differences of FK") {
  const RobotModel arm = builtin_arm7();
  const double eps = 1e-6;
  for (int trial = 0; trial < 250; ++trial) {
    VecX q(7);
    for (int i = 0; i < 7; ++i)
      q[i] = oracles::uniform(arm.joint(i).q_lo + 0.1, arm.joint(i).q_hi - 0.1);
    const int frame = trial % 4;
    const Mat6X j = geometric_jacobian(arm, q, frame);
    for (int m = 0; m < 7; ++m) {
      VecX qp = q, qm = q;
      qp[m] += eps;
      qm[m] -= eps;
      const Vec3 dp = (forward_kinematics(arm, qp)[frame].o -
                       forward_kinematics(arm, qm)[frame].o) /
                      (2 * eps);
      CHECK((j.col(m).head<3>() - dp).norm() < 1e-6);
    }
  }
}

TEST_CASE("jacobian time derivative: stationary chain and planar case") {
  const RobotModel arm = builtin_arm7();
  VecX q(7);
  for (int i = 0; i < 7; ++i) q[i] = oracles::uniform(-1.0, 1.0);
  CHECK(jacobian_time_derivative(arm, q, VecX::Zero(7), 2).cwiseAbs().maxCoeff() == 0.0);

  const RobotModel one = make_planar_chain({1.0});
  VecX q1 = VecX::Zero(1), qd1 = VecX::Ones(1);
  const Mat6X jd = jacobian_time_derivative(one, q1, qd1, 0);
  CHECK(jd(0, 0) == Catch::Approx(-1.0));
  CHECK(jd(1, 0) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("jacobian time derivative matches directional finite differences") {
  const RobotModel arm = builtin_arm7();
  const double eps = 1e-7;
  for (int trial = 0; trial < 250; ++trial) {
    VecX q(7), qd(7);
    for (int i = 0; i < 7; ++i) {
      q[i] = oracles::uniform(arm.joint(i).q_lo + 0.1, arm.joint(i).q_hi - 0.1);
      qd[i] = oracles::uniform(-1.5, 1.5);
    }
    const int frame = trial % 4;
    const Mat6X jd = jacobian_time_derivative(arm, q, qd, frame);
    const Mat6X fd = (geometric_jacobian(arm, q + eps * qd, frame) -
                      geometric_jacobian(arm, q - eps * qd, frame)) /
                     (2 * eps);
    CHECK((jd - fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("model validation rejects bad specs") {
  auto joints = std::vector<JointSpec>(1);
  joints[0].name = "j";
  joints[0].axis = Vec3(0, 0, 2.0);  // not unit
  CHECK_THROWS_AS(RobotModel::make("bad", Pose{}, Vec3::Zero(), joints, {}, {}),
                  ModelError);

  joints[0].axis = Vec3::UnitZ();
  joints[0].mass = -1.0;
  CHECK_THROWS_AS(RobotModel::make("bad", Pose{}, Vec3::Zero(), joints, {}, {}),
                  ModelError);

  joints[0].mass = 1.0;
  joints[0].q_lo = 2.0;
  joints[0].q_hi = -2.0;
  CHECK_THROWS_AS(RobotModel::make("bad", Pose{}, Vec3::Zero(), joints, {}, {}),
                  ModelError);
}
