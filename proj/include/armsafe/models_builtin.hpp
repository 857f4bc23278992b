#pragma once

#include <vector>

#include "armsafe/model.hpp"

// Built-in arm descriptions. The 7-DOF arm mirrors the published joint-limit
// ranges of a Franka Research 3; kinematic offsets, masses and inertias are
// plausible placeholders for a desk-scale arm of that class, not vendor data.

namespace armsafe {

inline RobotModel builtin_planar3() {
  std::vector<JointSpec> joints(3);
  const double len[3] = {0.40, 0.35, 0.30};
  const double mass[3] = {2.0, 1.5, 1.0};
  for (int i = 0; i < 3; ++i) {
    JointSpec& j = joints[i];
    j.name = "j" + std::to_string(i + 1);
    j.origin.translation = (i == 0) ? Vec3(0, 0, 0.10) : Vec3(len[i - 1], 0, 0);
    j.axis = Vec3::UnitZ();
    j.mass = mass[i];
    j.com = Vec3(0.5 * len[i], 0, 0);
    const double izz = mass[i] * len[i] * len[i] / 12.0;
    j.inertia = Vec3(0.2 * izz, izz, izz).asDiagonal();
    j.viscous_friction = 0.1;
    j.q_lo = -2.9; j.q_hi = 2.9;
    j.qd_lo = -2.5; j.qd_hi = 2.5;
    j.u_lo = -30.0; j.u_hi = 30.0;
  }

  std::vector<AttachmentSpec> atts(2);
  atts[0].name = "mid";
  atts[0].link = 1;
  atts[0].origin.translation = Vec3(0.5 * len[1], 0, 0);
  atts[1].name = "tip";
  atts[1].link = 2;
  atts[1].origin.translation = Vec3(len[2], 0, 0);

  std::vector<Ellipsoid> bodies(2);
  bodies[0].attachment = 0;
  bodies[0].Q = Vec3(1.0 / (0.22 * 0.22), 1.0 / (0.06 * 0.06), 1.0 / (0.06 * 0.06))
                    .asDiagonal();
  bodies[1].attachment = 1;
  bodies[1].Q = Vec3(1.0 / (0.08 * 0.08), 1.0 / (0.06 * 0.06), 1.0 / (0.06 * 0.06))
                    .asDiagonal();

  return RobotModel::make("planar3", Pose{}, Vec3(0, 0, -9.81), std::move(joints),
                          std::move(atts), std::move(bodies));
}

inline RobotModel builtin_arm7() {
  std::vector<JointSpec> joints(7);
  const Vec3 offsets[7] = {
      {0, 0, 0.333}, {0, 0, 0}, {0, 0, 0.316}, {0.0825, 0, 0},
      {-0.0825, 0, 0.384}, {0, 0, 0.15}, {0.088, 0, 0.05}};
  const Vec3 axes[7] = {Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitY(),
                        Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitZ()};
  const double mass[7] = {4.0, 4.0, 3.0, 3.0, 2.5, 1.5, 0.8};
  const Vec3 com[7] = {{0, 0, -0.05}, {0, 0, 0.15}, {0.03, 0, 0},
                       {-0.04, 0, 0.18}, {0, 0, 0.07}, {0.04, 0, 0.02},
                       {0, 0, 0.06}};
  const double q_lo[7] = {-2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175, -2.8973};
  const double q_hi[7] = {2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973};
  const double qd_lim[7] = {2.175, 2.175, 2.175, 2.175, 2.61, 2.61, 2.61};
  const double u_lim[7] = {87, 87, 87, 87, 12, 12, 12};

  for (int i = 0; i < 7; ++i) {
    JointSpec& j = joints[i];
    j.name = "j" + std::to_string(i + 1);
    j.origin.translation = offsets[i];
    j.axis = axes[i];
    j.mass = mass[i];
    j.com = com[i];
    const double r2 = 0.06 * 0.06;
    j.inertia = (mass[i] * Vec3(2.0 * r2, 2.0 * r2, r2)).asDiagonal();
    j.viscous_friction = 0.1;
    j.q_lo = q_lo[i]; j.q_hi = q_hi[i];
    j.qd_lo = -qd_lim[i]; j.qd_hi = qd_lim[i];
    j.u_lo = -u_lim[i]; j.u_hi = u_lim[i];
  }

  // collision frames on the last three links + end effector
  std::vector<AttachmentSpec> atts(4);
  atts[0].name = "forearm";
  atts[0].link = 3;
  atts[0].origin.translation = Vec3(-0.041, 0, 0.19);
  atts[1].name = "wrist";
  atts[1].link = 4;
  atts[1].origin.translation = Vec3(0, 0, 0.075);
  atts[2].name = "flange";
  atts[2].link = 5;
  atts[2].origin.translation = Vec3(0.044, 0, 0.025);
  atts[3].name = "ee";
  atts[3].link = 6;
  atts[3].origin.translation = Vec3(0, 0, 0.07);

  auto axis_q = [](double a, double b, double c) {
    return Vec3(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)).asDiagonal().toDenseMatrix();
  };
  std::vector<Ellipsoid> bodies(4);
  bodies[0] = Ellipsoid{axis_q(0.080, 0.080, 0.230), Vec3::Zero(), 0};
  bodies[1] = Ellipsoid{axis_q(0.075, 0.075, 0.120), Vec3::Zero(), 1};
  bodies[2] = Ellipsoid{axis_q(0.070, 0.070, 0.090), Vec3::Zero(), 2};
  bodies[3] = Ellipsoid{axis_q(0.070, 0.070, 0.110), Vec3::Zero(), 3};

  return RobotModel::make("arm7", Pose{}, Vec3(0, 0, -9.81), std::move(joints),
                          std::move(atts), std::move(bodies));
}

/// Lookup by name ("planar3" / "arm7"), used by the "builtin:<name>" scheme
/// in scenario files.
inline RobotModel builtin_model(const std::string& name) {
  if (name == "planar3") return builtin_planar3();
  if (name == "arm7") return builtin_arm7();
  throw ConfigError("unknown builtin model: " + name);
}

}  // namespace armsafe
