#pragma once

// Multivariate Gaussian observations with unknown mean and covariance,
// conjugate Normal-Inverse-Wishart posterior. Accumulator coordinates:
//   xi = [S1 (d), vec(S2) (d*d), n2], eta = kappa
// with S1 accumulating x, S2 accumulating x x^T, n2 the log-det terms and
// kappa the Mahalanobis terms. dof = n2 - d - 2 and the IW scale matrix is
// Psi = S2 - S1 S1^T / kappa.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string_view>

#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

class GaussianNiw {
 public:
  using Observation = Eigen::VectorXd;

  explicit GaussianNiw(int dim) : d_(dim) {
    if (dim < 1) throw config_error("gaussian-niw: dimension must be >= 1");
  }

  int dim() const { return d_; }
  Eigen::Index xi_dim() const { return d_ + d_ * d_ + 1; }
  std::string_view name() const { return "gaussian-niw"; }

  // mu | Sigma ~ N(mu0, Sigma/kappa), Sigma ~ InverseWishart(scale, dof).
  NaturalParams from_moments(const Eigen::VectorXd& mu0, double kappa, double dof,
                             const Eigen::MatrixXd& scale) const {
    if (mu0.size() != d_ || scale.rows() != d_ || scale.cols() != d_) {
      throw config_error("gaussian-niw: prior dimension mismatch");
    }
    Eigen::VectorXd xi(xi_dim());
    xi.head(d_) = kappa * mu0;
    Eigen::MatrixXd s2 = scale + kappa * mu0 * mu0.transpose();
    xi.segment(d_, d_ * d_) = Eigen::Map<Eigen::VectorXd>(s2.data(), d_ * d_);
    xi[xi.size() - 1] = dof + d_ + 2.0;
    return NaturalParams(xi, kappa);
  }

  Eigen::VectorXd s1(const NaturalParams& th) const { return th.xi.head(d_); }
  Eigen::MatrixXd s2(const NaturalParams& th) const {
    return Eigen::Map<const Eigen::MatrixXd>(th.xi.data() + d_, d_, d_);
  }
  double n2(const NaturalParams& th) const { return th.xi[th.xi.size() - 1]; }
  double dof(const NaturalParams& th) const { return n2(th) - d_ - 2.0; }
  double kappa(const NaturalParams& th) const { return th.eta; }

  Eigen::VectorXd mean(const NaturalParams& th) const { return s1(th) / th.eta; }

  Eigen::MatrixXd psi(const NaturalParams& th) const {
    const Eigen::VectorXd v = s1(th);
    return s2(th) - v * v.transpose() / th.eta;
  }

  // E[Sigma] = Psi / (dof - d - 1), defined for dof > d + 1.
  Eigen::MatrixXd expected_cov(const NaturalParams& th) const {
    return psi(th) / (dof(th) - d_ - 1.0);
  }

  bool valid(const NaturalParams& th) const {
    if (th.xi.size() != xi_dim() || !th.finite()) return false;
    if (th.eta <= 0.0 || dof(th) <= d_ - 1.0) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(psi(th));
    if (llt.info() != Eigen::Success) return false;
    for (int i = 0; i < d_; ++i) {
      if (!(llt.matrixL()(i, i) > 0.0)) return false;
    }
    return true;
  }

  double log_partition(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double nu = dof(th);
    Eigen::LLT<Eigen::MatrixXd> llt(psi(th));
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("gaussian-niw: scale matrix not positive definite");
    }
    double log_det = 0.0;
    for (int i = 0; i < d_; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    return -0.5 * (n2(th) - 1.0) * d_ * kLog2Pi - 0.5 * d_ * std::log(th.eta) +
           0.5 * nu * d_ * std::numbers::ln2 + log_multivariate_gamma(0.5 * nu, d_) -
           0.5 * nu * log_det;
  }

  MeanParams mean_params(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double nu = dof(th);
    const Eigen::MatrixXd p = psi(th);
    Eigen::LLT<Eigen::MatrixXd> llt(p);
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("gaussian-niw: scale matrix not positive definite");
    }
    double log_det = 0.0;
    for (int i = 0; i < d_; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const Eigen::MatrixXd psi_inv = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
    const Eigen::VectorXd v = s1(th);
    const Eigen::VectorXd psi_inv_s1 = psi_inv * v;

    Eigen::VectorXd m(xi_dim() + 1);
    m.head(d_) = (nu / th.eta) * psi_inv_s1;                    // E[Sigma^{-1} mu]
    Eigen::MatrixXd ds2 = -0.5 * nu * psi_inv;                  // pairs with x x^T
    m.segment(d_, d_ * d_) = Eigen::Map<Eigen::VectorXd>(ds2.data(), d_ * d_);
    m[d_ + d_ * d_] = -0.5 * d_ * kLog2Pi + 0.5 * d_ * std::numbers::ln2 +
                      0.5 * multivariate_digamma(0.5 * nu, d_) - 0.5 * log_det;
    m[xi_dim()] = -0.5 * d_ / th.eta -
                  0.5 * (nu / (th.eta * th.eta)) * v.dot(psi_inv_s1);  // E[-mu^T Sigma^{-1} mu / 2]
    return {m};
  }

  SufficientStats suff_stats(const Observation& x) const {
    if (x.size() != d_) {
      throw std::domain_error("gaussian-niw: observation dimension " + std::to_string(x.size()) +
                              " does not match family dimension " + std::to_string(d_));
    }
    if (!x.allFinite()) throw std::domain_error("gaussian-niw: non-finite observation");
    Eigen::VectorXd t(xi_dim());
    t.head(d_) = x;
    Eigen::MatrixXd outer = x * x.transpose();
    t.segment(d_, d_ * d_) = Eigen::Map<Eigen::VectorXd>(outer.data(), d_ * d_);
    t[t.size() - 1] = 1.0;
    return {t, 1.0};
  }

 private:
  int d_;
};

}  // namespace hafvf
