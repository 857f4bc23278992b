#pragma once

#include <optional>
#include <string>

#include "armsafe/alpha_derivatives.hpp"
#include "armsafe/dynamics.hpp"
#include "armsafe/kinematics.hpp"
#include "armsafe/savgol.hpp"
#include "armsafe/theta.hpp"

namespace armsafe {

/// Linear class-K slopes of the psi chains plus the safety level alpha0.
struct HocbfGains {
  double gamma1 = 15.0;   // collision psi_0 -> psi_1
  double gamma2 = 15.0;   // collision psi_1 -> input
  double alpha0 = 1.03;   // safety level, > 1
  double gamma_q1 = 20.0; // joint-angle chain
  double gamma_q2 = 20.0;
  double gamma_v = 10.0;  // joint-velocity chain

  void validate() const {
    if (!(gamma1 > 0 && gamma2 > 0 && gamma_q1 > 0 && gamma_q2 > 0 && gamma_v > 0))
      throw ConfigError("hocbf gains must be positive");
    if (!(alpha0 > 1.0)) throw ConfigError("alpha0 must exceed 1");
  }
};

/// Collision pair (robot i, body k) x (robot j, body l), i < j.
struct PairKey {
  int robot_i = 0;
  int body_k = 0;
  int robot_j = 1;
  int body_l = 0;

  PairKey() = default;
  PairKey(int ri, int bk, int rj, int bl)
      : robot_i(ri), body_k(bk), robot_j(rj), body_l(bl) {
    if (!(robot_i < robot_j)) throw ConfigError("PairKey requires robot_i < robot_j");
  }

  std::string label() const {
    return "r" + std::to_string(robot_i) + "e" + std::to_string(body_k) + "-r" +
           std::to_string(robot_j) + "e" + std::to_string(body_l);
  }
};

enum class HessSource { analytical, estimated };
enum class DecisionSpace { torque, acceleration };

enum class RowKind {
  pair,
  angle_lower,
  angle_upper,
  velocity_lower,
  velocity_upper,
  torque_lower,
  torque_upper,
};

/// One inequality row, coeff . var >= rhs over the stacked decision variable
/// (u_ij in torque space, qdd_ij after to_acceleration_space). psi0/psi1 are
/// diagnostics of the generating chain.
struct HocbfRow {
  RowKind kind = RowKind::pair;
  PairKey pair;
  int robot = -1;  // owning robot for limit rows
  int joint = -1;
  RowVecX coeff;
  double rhs = 0.0;
  double psi0 = 0.0;
  double psi1 = 0.0;
  double hess_contrib = 0.0;
};

/// Everything the row assembly needs about one robot at one control step,
/// computed once from the (measured) state.
struct RobotStepData {
  const RobotModel* model = nullptr;
  RobotState state;
  KinematicsCache kin;
  MatX M;
  MatX Minv;
  VecX sigma;
};

inline RobotStepData make_step_data(const RobotModel& model, const RobotState& state) {
  RobotStepData d;
  d.model = &model;
  d.state = state;
  d.kin = compute_kinematics(model, state.q, &state.qd);
  d.M = mass_matrix(model, state.q);
  d.Minv = d.M.llt().solve(MatX::Identity(model.n_joints(), model.n_joints()));
  d.sigma = bias_terms(model, state.q, state.qd);
  return d;
}

/// Per-pair state surviving across control steps: quaternion sign branch
/// (antipodal continuity) and the gradient history of the SG estimator.
struct PairContext {
  PairContext() = default;
  explicit PairContext(const EstimatorConfig& cfg) : history(cfg) {}

  bool has_prev = false;
  Vec4 prev_xi_A = quat_identity();
  Vec4 prev_xi_B = quat_identity();
  std::optional<GradientHistory> history;
};

/// Assembles the torque-space collision constraint row for one pair:
///   Lg psi1 u_ij >= -Lf psi1 - gamma2 psi1,
/// with Lg = grad^T T Omega Upsilon and Lf per the pairwise chain rule. The
/// Hessian contribution comes from hess_alpha (analytical) or the pair's SG
/// history (estimated; requires ctx with a configured history).
inline HocbfRow pair_constraint_terms(const RobotStepData& a, int body_k,
                                      const RobotStepData& b, int body_l,
                                      const HocbfGains& gains, HessSource source,
                                      PairContext* ctx = nullptr) {
  const Ellipsoid& ea = a.model->ellipsoids().at(body_k);
  const Ellipsoid& eb = b.model->ellipsoids().at(body_l);
  FramePose pose_a = a.kin.frames.at(ea.attachment);
  FramePose pose_b = b.kin.frames.at(eb.attachment);

  if (ctx != nullptr && ctx->has_prev) {
    pose_a.xi = quat_align_sign(pose_a.xi, ctx->prev_xi_A);
    pose_b.xi = quat_align_sign(pose_b.xi, ctx->prev_xi_B);
  }
  if (ctx != nullptr) {
    ctx->prev_xi_A = pose_a.xi;
    ctx->prev_xi_B = pose_b.xi;
    ctx->has_prev = true;
  }

  const ScalingResult scaling = min_scaling(ea, pose_a, eb, pose_b);
  const Vec14 grad = grad_alpha(ea, pose_a, eb, pose_b, scaling);

  const LieWorkspace lie = build_lie_workspace(
      pose_a.xi, a.kin.J.at(ea.attachment), a.kin.Jdot.at(ea.attachment), a.state.qd,
      pose_b.xi, b.kin.J.at(eb.attachment), b.kin.Jdot.at(eb.attachment), b.state.qd,
      a.Minv, b.Minv, a.sigma, b.sigma);

  const double psi0 = scaling.alpha - gains.alpha0;
  const double psi0_dot = grad.dot(lie.theta_dot);
  const double psi1 = psi0_dot + gains.gamma1 * psi0;

  double hc = 0.0;
  if (source == HessSource::analytical) {
    const Mat14 hess = hess_alpha(ea, pose_a, eb, pose_b, scaling);
    hc = lie.theta_dot.dot(hess * lie.theta_dot);
  } else {
    if (ctx == nullptr || !ctx->history.has_value())
      throw ConfigError("estimated Hessian contribution needs a pair history");
    hc = hessian_contribution(ctx->history->push_and_estimate(grad), lie.theta_dot);
  }

  const RowVecX grad_T_omega =
      (grad.transpose() * lie.T) * lie.Omega;  // 1 x (ni+nj)
  const double drift = grad.dot(lie.Tdot * (lie.Omega * lie.qd) +
                                lie.T * (lie.Omegadot * lie.qd)) -
                       grad_T_omega.dot(lie.Upsilon * lie.sigma);
  const double lf = hc + gains.gamma1 * psi0_dot + drift;

  HocbfRow row;
  row.kind = RowKind::pair;
  row.coeff = grad_T_omega * lie.Upsilon;
  row.rhs = -lf - gains.gamma2 * psi1;
  row.psi0 = psi0;
  row.psi1 = psi1;
  row.hess_contrib = hc;
  return row;
}

/// Torque-space joint angle HOCBF rows (two per joint, relative degree 2).
inline std::vector<HocbfRow> joint_angle_rows(const RobotStepData& d,
                                              const HocbfGains& gains) {
  const RobotModel& model = *d.model;
  const int n = model.n_joints();
  std::vector<HocbfRow> rows;
  rows.reserve(2 * n);
  for (int m = 0; m < n; ++m) {
    const double q = d.state.q[m];
    const double qd = d.state.qd[m];
    const double bias_acc = d.Minv.row(m).dot(d.sigma);  // e_m^T M^-1 sigma

    HocbfRow lower;
    lower.kind = RowKind::angle_lower;
    lower.robot = 0;
    lower.joint = m;
    lower.coeff = d.Minv.row(m);
    lower.psi0 = q - model.joint(m).q_lo;
    lower.psi1 = qd + gains.gamma_q1 * lower.psi0;
    const double lf_lo = -bias_acc + gains.gamma_q1 * qd;
    lower.rhs = -lf_lo - gains.gamma_q2 * lower.psi1;
    rows.push_back(std::move(lower));

    HocbfRow upper;
    upper.kind = RowKind::angle_upper;
    upper.robot = 0;
    upper.joint = m;
    upper.coeff = -d.Minv.row(m);
    upper.psi0 = model.joint(m).q_hi - q;
    upper.psi1 = -qd + gains.gamma_q1 * upper.psi0;
    const double lf_hi = bias_acc - gains.gamma_q1 * qd;
    upper.rhs = -lf_hi - gains.gamma_q2 * upper.psi1;
    rows.push_back(std::move(upper));
  }
  return rows;
}

/// Torque-space joint velocity CBF rows (relative degree 1).
inline std::vector<HocbfRow> joint_velocity_rows(const RobotStepData& d,
                                                 const HocbfGains& gains) {
  const RobotModel& model = *d.model;
  const int n = model.n_joints();
  std::vector<HocbfRow> rows;
  rows.reserve(2 * n);
  for (int m = 0; m < n; ++m) {
    const double qd = d.state.qd[m];
    const double bias_acc = d.Minv.row(m).dot(d.sigma);

    HocbfRow lower;
    lower.kind = RowKind::velocity_lower;
    lower.robot = 0;
    lower.joint = m;
    lower.coeff = d.Minv.row(m);
    lower.psi0 = qd - model.joint(m).qd_lo;
    lower.psi1 = lower.psi0;
    lower.rhs = bias_acc - gains.gamma_v * lower.psi0;
    rows.push_back(std::move(lower));

    HocbfRow upper;
    upper.kind = RowKind::velocity_upper;
    upper.robot = 0;
    upper.joint = m;
    upper.coeff = -d.Minv.row(m);
    upper.psi0 = model.joint(m).qd_hi - qd;
    upper.psi1 = upper.psi0;
    upper.rhs = -bias_acc - gains.gamma_v * upper.psi0;
    rows.push_back(std::move(upper));
  }
  return rows;
}

/// Rewrites a torque-space row over the stacked acceleration variable via
/// u = M qdd + sigma: coeff' = coeff M, rhs' = rhs - coeff . sigma.
inline HocbfRow to_acceleration_space(const HocbfRow& row, const MatX& mass_stack,
                                      const VecX& sigma_stack) {
  if (row.coeff.size() != mass_stack.rows() || row.coeff.size() != sigma_stack.size())
    throw ConfigError("to_acceleration_space: dimension mismatch");
  HocbfRow out = row;
  out.coeff = row.coeff * mass_stack;
  out.rhs = row.rhs - row.coeff.dot(sigma_stack);
  return out;
}

/// Actuator torque limits as rows over the acceleration variable
/// (u = M qdd + sigma must stay inside [u_lo, u_hi]).
inline std::vector<HocbfRow> torque_bound_rows_acceleration(const RobotStepData& d) {
  const RobotModel& model = *d.model;
  const int n = model.n_joints();
  std::vector<HocbfRow> rows;
  rows.reserve(2 * n);
  for (int m = 0; m < n; ++m) {
    HocbfRow lower;
    lower.kind = RowKind::torque_lower;
    lower.robot = 0;
    lower.joint = m;
    lower.coeff = d.M.row(m);
    lower.rhs = model.joint(m).u_lo - d.sigma[m];
    rows.push_back(std::move(lower));

    HocbfRow upper;
    upper.kind = RowKind::torque_upper;
    upper.robot = 0;
    upper.joint = m;
    upper.coeff = -d.M.row(m);
    upper.rhs = d.sigma[m] - model.joint(m).u_hi;
    rows.push_back(std::move(upper));
  }
  return rows;
}

}  // namespace armsafe
