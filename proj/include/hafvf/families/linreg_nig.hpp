#pragma once

// Bayesian linear regression with unknown noise variance: observations are
// (regressor u, response y) pairs, the conjugate posterior is
// Normal-Inverse-Gamma over (weights, noise variance). Accumulators:
//   xi = [vec(P) (p*p), r (p), s2], eta = n2
// with P accumulating u u^T, r accumulating u y, s2 accumulating y^2 and n2
// the observation count. Weights: w | v ~ N(P^{-1} r, v P^{-1}),
// v ~ InverseGamma((n2-p-2)/2, (s2 - r^T P^{-1} r)/2).

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string_view>

#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

struct RegressionObs {
  Eigen::VectorXd u;
  double y = 0.0;
};

class LinRegNig {
 public:
  using Observation = RegressionObs;

  explicit LinRegNig(int order) : p_(order) {
    if (order < 1) throw config_error("linreg-nig: regressor dimension must be >= 1");
  }

  int order() const { return p_; }
  Eigen::Index xi_dim() const { return p_ * p_ + p_ + 1; }
  std::string_view name() const { return "linreg-nig"; }

  // Ridge-style proper prior: weights ~ N(0, v/lambda I), v ~ IG(shape, rate).
  NaturalParams ridge_prior(double lambda, double shape, double rate) const {
    if (!(lambda > 0.0) || !(shape > 0.0) || !(rate > 0.0)) {
      throw config_error("linreg-nig: ridge prior requires positive lambda, shape, rate");
    }
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(xi_dim());
    Eigen::MatrixXd prec = lambda * Eigen::MatrixXd::Identity(p_, p_);
    xi.head(p_ * p_) = Eigen::Map<Eigen::VectorXd>(prec.data(), p_ * p_);
    xi[xi.size() - 1] = 2.0 * rate;
    return NaturalParams(xi, 2.0 * shape + p_ + 2.0);
  }

  Eigen::MatrixXd precision(const NaturalParams& th) const {
    return Eigen::Map<const Eigen::MatrixXd>(th.xi.data(), p_, p_);
  }
  Eigen::VectorXd r(const NaturalParams& th) const { return th.xi.segment(p_ * p_, p_); }
  double s2(const NaturalParams& th) const { return th.xi[th.xi.size() - 1]; }
  double shape(const NaturalParams& th) const { return 0.5 * (th.eta - p_ - 2.0); }
  double rate(const NaturalParams& th) const {
    const Eigen::VectorXd rv = r(th);
    Eigen::LLT<Eigen::MatrixXd> llt(precision(th));
    return 0.5 * (s2(th) - rv.dot(llt.solve(rv)));
  }

  Eigen::VectorXd coef_mean(const NaturalParams& th) const {
    Eigen::LLT<Eigen::MatrixXd> llt(precision(th));
    return llt.solve(r(th));
  }

  // E[v] = rate/(shape-1) for shape > 1.
  double noise_var_mean(const NaturalParams& th) const {
    const double a = shape(th);
    return a > 1.0 ? rate(th) / (a - 1.0) : std::numeric_limits<double>::quiet_NaN();
  }

  // Marginal coefficient variances: Var[w_j] = rate/(shape-1) * (P^{-1})_jj.
  Eigen::VectorXd coef_var(const NaturalParams& th) const {
    Eigen::LLT<Eigen::MatrixXd> llt(precision(th));
    const Eigen::MatrixXd pinv = llt.solve(Eigen::MatrixXd::Identity(p_, p_));
    const double a = shape(th);
    const double scale = a > 1.0 ? rate(th) / (a - 1.0) : std::numeric_limits<double>::quiet_NaN();
    return scale * pinv.diagonal();
  }

  bool valid(const NaturalParams& th) const {
    if (th.xi.size() != xi_dim() || !th.finite()) return false;
    if (shape(th) <= 0.0) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(precision(th));
    if (llt.info() != Eigen::Success) return false;
    for (int i = 0; i < p_; ++i) {
      if (!(llt.matrixL()(i, i) > 0.0)) return false;
    }
    const Eigen::VectorXd rv = r(th);
    return 0.5 * (s2(th) - rv.dot(llt.solve(rv))) > 0.0;
  }

  double log_partition(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    Eigen::LLT<Eigen::MatrixXd> llt(precision(th));
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("linreg-nig: precision accumulator not positive definite");
    }
    double log_det = 0.0;
    for (int i = 0; i < p_; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const Eigen::VectorXd rv = r(th);
    const double a = shape(th);
    const double b = 0.5 * (s2(th) - rv.dot(llt.solve(rv)));
    if (!(b > 0.0)) throw std::domain_error("linreg-nig: nonpositive residual scale");
    return -0.5 * (th.eta - p_) * kLog2Pi - 0.5 * log_det + log_gamma(a) - a * std::log(b);
  }

  MeanParams mean_params(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    Eigen::LLT<Eigen::MatrixXd> llt(precision(th));
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("linreg-nig: precision accumulator not positive definite");
    }
    const Eigen::MatrixXd pinv = llt.solve(Eigen::MatrixXd::Identity(p_, p_));
    const Eigen::VectorXd rv = r(th);
    const Eigen::VectorXd mean_w = pinv * rv;
    const double a = shape(th);
    const double b = 0.5 * (s2(th) - rv.dot(mean_w));
    const double precision_mean = a / b;  // E[1/v]

    Eigen::VectorXd m(xi_dim() + 1);
    // pairs with u u^T: E[-w w^T/(2v)] = -0.5 (E[1/v] m m^T + P^{-1})
    Eigen::MatrixXd dP = -0.5 * (precision_mean * mean_w * mean_w.transpose() + pinv);
    m.head(p_ * p_) = Eigen::Map<Eigen::VectorXd>(dP.data(), p_ * p_);
    m.segment(p_ * p_, p_) = precision_mean * mean_w;  // E[w/v]
    m[p_ * p_ + p_] = -0.5 * precision_mean;           // E[-1/(2v)]
    m[xi_dim()] = -0.5 * (kLog2Pi + std::log(b) - digamma(a));
    return {m};
  }

  SufficientStats suff_stats(const Observation& obs) const {
    if (obs.u.size() != p_) {
      throw std::domain_error("linreg-nig: regressor dimension " + std::to_string(obs.u.size()) +
                              " does not match order " + std::to_string(p_));
    }
    if (!obs.u.allFinite() || !std::isfinite(obs.y)) {
      throw std::domain_error("linreg-nig: non-finite observation");
    }
    Eigen::VectorXd t(xi_dim());
    Eigen::MatrixXd outer = obs.u * obs.u.transpose();
    t.head(p_ * p_) = Eigen::Map<Eigen::VectorXd>(outer.data(), p_ * p_);
    t.segment(p_ * p_, p_) = obs.u * obs.y;
    t[t.size() - 1] = obs.y * obs.y;
    return {t, 1.0};
  }

 private:
  int p_;
};

}  // namespace hafvf
