#pragma once

#include <vector>

#include "armsafe/common.hpp"

namespace armsafe {

struct EstimatorConfig {
  int window = 25;   // W
  int order = 2;     // polynomial degree d < W
  double dt = 1e-3;  // sample period

  void validate() const {
    if (window < 2) throw ConfigError("sg estimator: window must be >= 2");
    if (order < 0 || order >= window)
      throw ConfigError("sg estimator: polynomial order must satisfy d < W");
    if (!(dt > 0.0)) throw ConfigError("sg estimator: dt must be positive");
  }
};

enum class SgEndpoint { causal, centered };

/// Savitzky-Golay first-derivative weights for samples at t_k = k*dt,
/// k = -(W-1)..0. `causal` evaluates the fitted polynomial's slope at the
/// newest sample (usable in a control loop); `centered` evaluates mid-window
/// and is for offline analysis only. Weights reproduce the slope of any
/// polynomial of degree <= d exactly and sum to zero.
inline VecX sg_derivative_weights(int window, int order, double dt,
                                  SgEndpoint endpoint = SgEndpoint::causal) {
  EstimatorConfig cfg{window, order, dt};
  cfg.validate();
  MatX vander(window, order + 1);
  for (int k = 0; k < window; ++k) {
    const double t = (k - (window - 1)) * dt;
    double pw = 1.0;
    for (int j = 0; j <= order; ++j) {
      vander(k, j) = pw;
      pw *= t;
    }
  }
  const double tau =
      (endpoint == SgEndpoint::causal) ? 0.0 : -0.5 * (window - 1) * dt;
  VecX eval = VecX::Zero(order + 1);
  double pw = 1.0;
  for (int j = 1; j <= order; ++j) {
    eval[j] = j * pw;
    pw *= tau;
  }
  // weights^T = eval^T (V^T V)^-1 V^T
  const MatX vtv = vander.transpose() * vander;
  return vander * vtv.ldlt().solve(eval);
}

/// Ring buffer of the last W gradient samples for one collision pair, with
/// per-fill weight caching so the warmup (growing window, clamped order)
/// costs one least-squares solve per new fill level.
class GradientHistory {
 public:
  explicit GradientHistory(const EstimatorConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    samples_.resize(cfg_.window, Vec14::Zero());
    weights_by_fill_.resize(cfg_.window + 1);
  }

  const EstimatorConfig& config() const { return cfg_; }
  int size() const { return fill_; }

  void clear() {
    fill_ = 0;
    head_ = 0;
  }

  /// Appends a sample and returns the SG estimate of d/dt(gradient) at the
  /// newest sample. One real sample yields zero; afterwards a window of the
  /// n available samples with order min(d, n-1) is used until full.
  Vec14 push_and_estimate(const Vec14& grad_sample) {
    samples_[head_] = grad_sample;
    head_ = (head_ + 1) % cfg_.window;
    if (fill_ < cfg_.window) ++fill_;
    if (fill_ < 2) return Vec14::Zero();

    const VecX& w = weights_for_fill(fill_);
    Vec14 est = Vec14::Zero();
    // oldest of the active window first; newest sample is at head_-1
    int idx = (head_ - fill_ + cfg_.window) % cfg_.window;
    for (int k = 0; k < fill_; ++k) {
      est += w[k] * samples_[idx];
      idx = (idx + 1) % cfg_.window;
    }
    return est;
  }

 private:
  const VecX& weights_for_fill(int n) {
    VecX& w = weights_by_fill_[n];
    if (w.size() == 0)
      w = sg_derivative_weights(n, std::min(cfg_.order, n - 1), cfg_.dt);
    return w;
  }

  EstimatorConfig cfg_;
  std::vector<Vec14> samples_;
  std::vector<VecX> weights_by_fill_;
  int head_ = 0;
  int fill_ = 0;
};

/// Hessian contribution: <d/dt grad_theta alpha*, theta_dot>.
inline double hessian_contribution(const Vec14& grad_rate, const Vec14& theta_dot) {
  return grad_rate.dot(theta_dot);
}

}  // namespace armsafe
