#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "armsafe/common.hpp"

// Dense convex QP solver:
//   min 1/2 x^T P x + q^T x   s.t.  G x <= h,  lb <= x <= ub,
// built as operator-splitting (ADMM) iterations on the stacked constraint
// A x in [l, u] with Ruiz equilibration, adaptive step size, primal
// infeasibility certificates, and an active-set polish of the final iterate.
// Iteration order is fixed, so a given problem + settings reproduces a
// bitwise-identical iterate sequence.

namespace armsafe {

struct QpProblem {
  MatX P;
  VecX q;
  MatX G;
  VecX h;
  VecX lb;
  VecX ub;

  int n() const { return static_cast<int>(q.size()); }
  int m() const { return static_cast<int>(h.size()); }

  void validate() const {
    if (P.rows() != n() || P.cols() != n()) throw ConfigError("qp: P dimension mismatch");
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff()))
      throw ConfigError("qp: P must be symmetric");
    if (G.size() > 0 && (G.rows() != m() || G.cols() != n()))
      throw ConfigError("qp: G dimension mismatch");
    if (lb.size() != 0 && lb.size() != n()) throw ConfigError("qp: lb dimension mismatch");
    if (ub.size() != 0 && ub.size() != n()) throw ConfigError("qp: ub dimension mismatch");
  }

  bool has_finite_box() const {
    for (int i = 0; i < lb.size(); ++i)
      if (std::isfinite(lb[i])) return true;
    for (int i = 0; i < ub.size(); ++i)
      if (std::isfinite(ub[i])) return true;
    return false;
  }
};

enum class QpStatus { optimal, primal_infeasible, max_iter };

struct QpSolution {
  QpStatus status = QpStatus::max_iter;
  VecX x;
  VecX duals;      // multipliers of the G rows (>= 0 at an optimum)
  VecX box_duals;  // multipliers of the box rows (signed)
  double primal_residual = kInf;
  double dual_residual = kInf;
  int iterations = 0;
  double objective = kInf;
  VecX certificate;  // Farkas-type vector over [G; box] rows when infeasible
  bool polished = false;
};

struct QpSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double relax_alpha = 1.6;
  bool adaptive_rho = true;
  int rho_interval = 50;
  double eps_infeasible = 1e-7;
  bool polish = true;
  int ruiz_iters = 10;
};

/// Initial iterate carried between consecutive solves.
struct QpWarmStart {
  VecX x;
  VecX y;  // stacked duals over [G; box] rows
};

/// Builds a warm start from a previous solution (used when dimensions match;
/// the solver cold-starts otherwise, and both converge to the same optimum).
inline QpWarmStart warm_start(const QpSolution& prev) {
  QpWarmStart w;
  w.x = prev.x;
  if (prev.duals.size() + prev.box_duals.size() > 0) {
    w.y.resize(prev.duals.size() + prev.box_duals.size());
    w.y.head(prev.duals.size()) = prev.duals;
    w.y.tail(prev.box_duals.size()) = prev.box_duals;
  }
  return w;
}

namespace qpdetail {

struct Stacked {
  MatX A;  // [G; I] (box block present only when some bound is finite)
  VecX l;
  VecX u;
  int mg = 0;
  bool box = false;
};

inline Stacked stack_constraints(const QpProblem& p) {
  Stacked s;
  s.mg = p.m();
  s.box = p.has_finite_box();
  const int n = p.n();
  const int mt = s.mg + (s.box ? n : 0);
  s.A.resize(mt, n);
  s.l.resize(mt);
  s.u.resize(mt);
  if (s.mg > 0) {
    s.A.topRows(s.mg) = p.G;
    s.l.head(s.mg).setConstant(-kInf);
    s.u.head(s.mg) = p.h;
  }
  if (s.box) {
    s.A.bottomRows(n) = MatX::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      s.l[s.mg + i] = (p.lb.size() > 0) ? p.lb[i] : -kInf;
      s.u[s.mg + i] = (p.ub.size() > 0) ? p.ub[i] : kInf;
    }
  }
  return s;
}

struct Scaling {
  VecX d;      // variable scaling
  VecX e;      // constraint scaling
  double c = 1.0;
};

/// Modified Ruiz equilibration of the KKT block structure.
inline Scaling ruiz(MatX& P, VecX& q, MatX& A, VecX& l, VecX& u, int iters) {
  const int n = static_cast<int>(q.size());
  const int m = static_cast<int>(A.rows());
  Scaling s;
  s.d = VecX::Ones(n);
  s.e = VecX::Ones(m);
  auto safe_inv_sqrt = [](double v) {
    return (v < 1e-12 || !std::isfinite(v)) ? 1.0 : 1.0 / std::sqrt(v);
  };
  for (int k = 0; k < iters; ++k) {
    VecX dj(n), ei(m);
    for (int j = 0; j < n; ++j) {
      double col = P.col(j).cwiseAbs().maxCoeff();
      if (m > 0) col = std::max(col, A.col(j).cwiseAbs().maxCoeff());
      dj[j] = safe_inv_sqrt(col);
    }
    for (int i = 0; i < m; ++i) ei[i] = safe_inv_sqrt(A.row(i).cwiseAbs().maxCoeff());
    P = dj.asDiagonal() * P * dj.asDiagonal();
    q = dj.cwiseProduct(q);
    if (m > 0) A = ei.asDiagonal() * A * dj.asDiagonal();
    s.d = s.d.cwiseProduct(dj);
    s.e = s.e.cwiseProduct(ei);

    double pnorm_mean = 0.0;
    for (int j = 0; j < n; ++j) pnorm_mean += P.col(j).cwiseAbs().maxCoeff();
    pnorm_mean /= n;
    const double gamma = 1.0 / std::max({pnorm_mean, q.cwiseAbs().maxCoeff(), 1e-12});
    P *= gamma;
    q *= gamma;
    s.c *= gamma;
  }
  for (int i = 0; i < m; ++i) {
    if (std::isfinite(l[i])) l[i] *= s.e[i];
    if (std::isfinite(u[i])) u[i] *= s.e[i];
  }
  return s;
}

}  // namespace qpdetail

inline QpSolution solve_qp(const QpProblem& prob, const QpSettings& settings = {},
                           const QpWarmStart* warm = nullptr) {
  prob.validate();
  const int n = prob.n();
  QpSolution sol;

  qpdetail::Stacked st = qpdetail::stack_constraints(prob);
  const int mt = static_cast<int>(st.A.rows());

  // no constraints at all: stationary point of the quadratic
  if (mt == 0) {
    sol.x = prob.P.ldlt().solve(-prob.q);
    sol.duals = VecX::Zero(0);
    sol.box_duals = VecX::Zero(0);
    sol.status = QpStatus::optimal;
    sol.primal_residual = 0.0;
    sol.dual_residual = (prob.P * sol.x + prob.q).cwiseAbs().maxCoeff();
    sol.objective = 0.5 * sol.x.dot(prob.P * sol.x) + prob.q.dot(sol.x);
    sol.iterations = 0;
    return sol;
  }

  // scaled copies
  MatX Ps = prob.P;
  VecX qs = prob.q;
  MatX As = st.A;
  VecX ls = st.l, us = st.u;
  const qpdetail::Scaling sc = qpdetail::ruiz(Ps, qs, As, ls, us, settings.ruiz_iters);

  double rho = settings.rho;
  auto factor = [&](double r) {
    return Eigen::LDLT<MatX>(Ps + settings.sigma * MatX::Identity(n, n) +
                             r * (As.transpose() * As));
  };
  Eigen::LDLT<MatX> kkt = factor(rho);

  VecX x = VecX::Zero(n), z = VecX::Zero(mt), y = VecX::Zero(mt);
  if (warm != nullptr && warm->x.size() == n) {
    x = sc.d.cwiseInverse().cwiseProduct(warm->x);
    if (warm->y.size() == mt)
      y = sc.c * warm->y.cwiseQuotient(sc.e);
    z = As * x;
  }

  const MatX& A_un = st.A;
  const auto unscale_x = [&](const VecX& xs) { return VecX(sc.d.cwiseProduct(xs)); };
  const auto unscale_y = [&](const VecX& ys) {
    return VecX(sc.e.cwiseProduct(ys) / sc.c);
  };

  int it = 0;
  for (it = 1; it <= settings.max_iter; ++it) {
    const VecX rhs = settings.sigma * x - qs + As.transpose() * (rho * z - y);
    const VecX x_tilde = kkt.solve(rhs);
    const VecX ax_tilde = As * x_tilde;
    const VecX x_next = settings.relax_alpha * x_tilde + (1.0 - settings.relax_alpha) * x;
    const VecX zeta = settings.relax_alpha * ax_tilde + (1.0 - settings.relax_alpha) * z;
    const VecX z_next = (zeta + y / rho).cwiseMax(ls).cwiseMin(us);
    const VecX y_next = y + rho * (zeta - z_next);
    const VecX dy = y_next - y;

    x = x_next;
    z = z_next;
    y = y_next;

    // unscaled residuals
    const VecX xu = unscale_x(x);
    const VecX zu = z.cwiseQuotient(sc.e);
    const VecX yu = unscale_y(y);
    const VecX ax = A_un * xu;
    const VecX px = prob.P * xu;
    const VecX aty = A_un.transpose() * yu;
    const double rp = (ax - zu).cwiseAbs().maxCoeff();
    const double rd = (px + prob.q + aty).cwiseAbs().maxCoeff();
    const double eps_p = settings.eps_abs +
                         settings.eps_rel * std::max(ax.cwiseAbs().maxCoeff(),
                                                     zu.cwiseAbs().maxCoeff());
    const double eps_d =
        settings.eps_abs +
        settings.eps_rel * std::max({px.cwiseAbs().maxCoeff(),
                                     prob.q.cwiseAbs().maxCoeff(),
                                     aty.cwiseAbs().maxCoeff()});
    sol.primal_residual = rp;
    sol.dual_residual = rd;

    if (rp <= eps_p && rd <= eps_d) {
      sol.status = QpStatus::optimal;
      sol.x = xu;
      sol.duals = yu.head(st.mg);
      sol.box_duals = st.box ? VecX(yu.tail(n)) : VecX::Zero(0);
      break;
    }

    // primal infeasibility certificate from the dual increment
    const VecX dyu = unscale_y(dy);
    const double dy_norm = dyu.cwiseAbs().maxCoeff();
    if (dy_norm > 1e-14) {
      const double eps = settings.eps_infeasible * dy_norm;
      bool cert = (A_un.transpose() * dyu).cwiseAbs().maxCoeff() <= eps;
      double support = 0.0;
      for (int i = 0; cert && i < mt; ++i) {
        const double d = dyu[i];
        if (d > eps && !std::isfinite(st.u[i])) cert = false;
        else if (d < -eps && !std::isfinite(st.l[i])) cert = false;
        else if (d > 0 && std::isfinite(st.u[i])) support += st.u[i] * d;
        else if (d < 0 && std::isfinite(st.l[i])) support += st.l[i] * d;
      }
      if (cert && support <= -eps) {
        sol.status = QpStatus::primal_infeasible;
        sol.x = unscale_x(x);
        sol.certificate = dyu / dy_norm;
        sol.duals = VecX::Zero(st.mg);
        sol.box_duals = VecX::Zero(st.box ? n : 0);
        sol.iterations = it;
        return sol;
      }
    }

    if (settings.adaptive_rho && (it % settings.rho_interval == 0)) {
      const double num = rp / std::max({ax.cwiseAbs().maxCoeff(), zu.cwiseAbs().maxCoeff(), 1e-12});
      const double den = rd / std::max({px.cwiseAbs().maxCoeff(), prob.q.cwiseAbs().maxCoeff(),
                                        aty.cwiseAbs().maxCoeff(), 1e-12});
      const double rho_new = std::clamp(rho * std::sqrt(num / std::max(den, 1e-12)), 1e-6, 1e6);
      if (rho_new > 5.0 * rho || rho_new < rho / 5.0) {
        rho = rho_new;
        kkt = factor(rho);
      }
    }
  }

  if (sol.status != QpStatus::optimal) {
    sol.status = QpStatus::max_iter;
    sol.x = unscale_x(x);
    sol.duals = unscale_y(y).head(st.mg);
    sol.box_duals = st.box ? VecX(unscale_y(y).tail(n)) : VecX::Zero(0);
  }
  sol.iterations = std::min(it, settings.max_iter);

  // polish: solve the KKT equalities of the detected active set
  if (sol.status == QpStatus::optimal && settings.polish) {
    const VecX yu_full = [&] {
      VecX f(mt);
      f.head(st.mg) = sol.duals;
      if (st.box) f.tail(n) = sol.box_duals;
      return f;
    }();
    const VecX zu = z.cwiseQuotient(sc.e);
    const double ytol = 1e-9 * std::max(1.0, yu_full.cwiseAbs().maxCoeff());
    std::vector<int> act_up, act_lo;
    for (int i = 0; i < mt; ++i) {
      const double ztol = 1e-6 * std::max(1.0, std::abs(zu[i]));
      if (std::isfinite(st.u[i]) && (yu_full[i] > ytol || st.u[i] - zu[i] < ztol))
        act_up.push_back(i);
      else if (std::isfinite(st.l[i]) && (yu_full[i] < -ytol || zu[i] - st.l[i] < ztol))
        act_lo.push_back(i);
    }
    const int na = static_cast<int>(act_up.size() + act_lo.size());
    if (na >= 0) {
      MatX kktp(n + na, n + na);
      kktp.setZero();
      kktp.topLeftCorner(n, n) = prob.P;
      VecX rhs(n + na);
      rhs.head(n) = -prob.q;
      int r = 0;
      for (int i : act_up) {
        kktp.block(n + r, 0, 1, n) = A_un.row(i);
        kktp.block(0, n + r, n, 1) = A_un.row(i).transpose();
        rhs[n + r] = st.u[i];
        ++r;
      }
      for (int i : act_lo) {
        kktp.block(n + r, 0, 1, n) = A_un.row(i);
        kktp.block(0, n + r, n, 1) = A_un.row(i).transpose();
        rhs[n + r] = st.l[i];
        ++r;
      }
      kktp.topLeftCorner(n, n) += 1e-12 * MatX::Identity(n, n);
      kktp.bottomRightCorner(na, na) -= 1e-12 * MatX::Identity(na, na);
      Eigen::PartialPivLU<MatX> lu(kktp);
      VecX sol_kkt = lu.solve(rhs);
      // one step of iterative refinement against the regularized system
      sol_kkt += lu.solve(rhs - kktp * sol_kkt);

      const VecX xp = sol_kkt.head(n);
      VecX yp = VecX::Zero(mt);
      r = 0;
      for (int i : act_up) yp[i] = sol_kkt[n + r++];
      for (int i : act_lo) yp[i] = sol_kkt[n + r++];

      const VecX axp = A_un * xp;
      double rp_p = 0.0;
      for (int i = 0; i < mt; ++i) {
        double v = 0.0;
        if (std::isfinite(st.u[i])) v = std::max(v, axp[i] - st.u[i]);
        if (std::isfinite(st.l[i])) v = std::max(v, st.l[i] - axp[i]);
        rp_p = std::max(rp_p, v);
      }
      const double rd_p =
          (prob.P * xp + prob.q + A_un.transpose() * yp).cwiseAbs().maxCoeff();
      bool duals_ok = true;
      for (int i : act_up)
        if (yp[i] < -1e-9) duals_ok = false;
      for (int i : act_lo)
        if (yp[i] > 1e-9) duals_ok = false;
      if (duals_ok && rp_p <= std::max(sol.primal_residual, settings.eps_abs) &&
          rd_p <= std::max(sol.dual_residual, settings.eps_abs)) {
        sol.x = xp;
        sol.duals = yp.head(st.mg);
        sol.box_duals = st.box ? VecX(yp.tail(n)) : VecX::Zero(0);
        sol.primal_residual = rp_p;
        sol.dual_residual = rd_p;
        sol.polished = true;
      }
    }
  }

  sol.objective = 0.5 * sol.x.dot(prob.P * sol.x) + prob.q.dot(sol.x);
  return sol;
}

}  // namespace armsafe
