#pragma once

// Conjugate-prior parameter containers shared by every family: the
// statistic-accumulator part xi and the effective-observation-count part eta.
// Mixture weighting and the conjugate data update are componentwise linear in
// (xi, eta), which is what makes the weighted-prior construction closed.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "hafvf/errors.hpp"

namespace hafvf {

struct NaturalParams {
  Eigen::VectorXd xi;
  double eta = 0.0;

  NaturalParams() = default;
  NaturalParams(Eigen::VectorXd xi_, double eta_) : xi(std::move(xi_)), eta(eta_) {}

  Eigen::Index xi_dim() const { return xi.size(); }

  // Concatenated view [xi; eta], the vector that pairs with mean parameters.
  Eigen::VectorXd full() const {
    Eigen::VectorXd v(xi.size() + 1);
    v.head(xi.size()) = xi;
    v[xi.size()] = eta;
    return v;
  }

  static NaturalParams from_full(const Eigen::VectorXd& v) {
    if (v.size() < 1) throw std::invalid_argument("NaturalParams::from_full: empty vector");
    return NaturalParams(v.head(v.size() - 1), v[v.size() - 1]);
  }

  bool same_shape(const NaturalParams& o) const { return xi.size() == o.xi.size(); }

  bool finite() const { return xi.allFinite() && std::isfinite(eta); }
};

// Sufficient statistics of one observation (or the sum over a batch of
// `count` observations). `t` adds to xi, `count` adds to eta.
struct SufficientStats {
  Eigen::VectorXd t;
  double count = 1.0;
};

// Expected sufficient statistics E[T(z)] = grad B(theta), in the same
// coordinates as [xi; eta].
struct MeanParams {
  Eigen::VectorXd m;
};

// vartheta = w * theta_prev + (1 - w) * theta_naive, componentwise.
inline NaturalParams weighted_prior(const NaturalParams& theta_prev,
                                    const NaturalParams& theta_naive, double w) {
  if (!theta_prev.same_shape(theta_naive)) {
    throw std::invalid_argument("weighted_prior: parameter dimensions differ (" +
                                std::to_string(theta_prev.xi_dim()) + " vs " +
                                std::to_string(theta_naive.xi_dim()) + ")");
  }
  if (!(w >= 0.0 && w <= 1.0)) {
    throw std::invalid_argument("weighted_prior: weight must lie in [0,1], got " +
                                std::to_string(w));
  }
  NaturalParams out;
  out.xi = w * theta_prev.xi + (1.0 - w) * theta_naive.xi;
  out.eta = w * theta_prev.eta + (1.0 - w) * theta_naive.eta;
  return out;
}

// Conjugate update: xi += sum T(x), eta += J.
inline NaturalParams update_theta(const NaturalParams& vartheta_hat, const SufficientStats& stats) {
  if (vartheta_hat.xi.size() != stats.t.size()) {
    throw std::invalid_argument("update_theta: statistic dimension " +
                                std::to_string(stats.t.size()) + " does not match xi dimension " +
                                std::to_string(vartheta_hat.xi.size()));
  }
  NaturalParams out;
  out.xi = vartheta_hat.xi + stats.t;
  out.eta = vartheta_hat.eta + stats.count;
  return out;
}

// The incremental-update reading of the conjugate step in the theta_0 = 0
// limit: E[z] = Q + alpha (T(x) - Q) with Q the previous average statistic
// and alpha the learning rate implied by the effective count.
struct RlView {
  Eigen::VectorXd q;              // theta_prev.xi / theta_prev.eta
  double alpha = 0.0;             // 1 / (w * theta_prev.eta + 1)
  Eigen::VectorXd reconstructed;  // Q + alpha (T(x) - Q)
};

inline RlView rl_view(const NaturalParams& theta_prev, double w_hat, const SufficientStats& stats) {
  if (theta_prev.eta <= 0.0) {
    throw numerical_error("rl_view: degenerate effective count eta = " +
                          std::to_string(theta_prev.eta));
  }
  if (!(w_hat >= 0.0 && w_hat <= 1.0)) {
    throw std::invalid_argument("rl_view: weight must lie in [0,1]");
  }
  if (stats.count != 1.0) {
    throw std::invalid_argument("rl_view: defined for single observations (J = 1)");
  }
  RlView out;
  out.q = theta_prev.xi / theta_prev.eta;
  out.alpha = 1.0 / (w_hat * theta_prev.eta + 1.0);
  out.reconstructed = out.q + out.alpha * (stats.t - out.q);
  return out;
}

}  // namespace hafvf
