#pragma once

// Scalar Gaussian observations with unknown mean and variance, conjugate
// Normal-Inverse-Gamma posterior. Stored in accumulator coordinates
//   xi = [s1, s2, n2], eta = kappa
// where s1 accumulates x, s2 accumulates x^2, n2 counts the 0.5*log(2*pi*v)
// terms and kappa the mu^2/(2v) terms. The human parameterization
// (mu0, kappa, shape, rate) maps linearly onto these.

#include <Eigen/Dense>
#include <cmath>
#include <string_view>

#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

class GaussianNig {
 public:
  using Observation = double;

  Eigen::Index xi_dim() const { return 3; }
  std::string_view name() const { return "gaussian-nig"; }

  // Build parameters from the conventional NIG quadruple:
  // mu | v ~ N(mu0, v/kappa), v ~ InverseGamma(shape, rate).
  static NaturalParams from_moments(double mu0, double kappa, double shape, double rate) {
    Eigen::VectorXd xi(3);
    xi << kappa * mu0, 2.0 * rate + kappa * mu0 * mu0, 2.0 * shape + 3.0;
    return NaturalParams(xi, kappa);
  }

  static double mu(const NaturalParams& th) { return th.xi[0] / th.eta; }
  static double kappa(const NaturalParams& th) { return th.eta; }
  static double shape(const NaturalParams& th) { return 0.5 * (th.xi[2] - 3.0); }
  static double rate(const NaturalParams& th) {
    return 0.5 * (th.xi[1] - th.xi[0] * th.xi[0] / th.eta);
  }

  bool valid(const NaturalParams& th) const {
    if (th.xi.size() != 3 || !th.finite()) return false;
    return th.eta > 0.0 && shape(th) > 0.0 && rate(th) > 0.0;
  }

  double log_partition(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double a = shape(th), b = rate(th);
    return -0.5 * (th.xi[2] - 1.0) * kLog2Pi - 0.5 * std::log(th.eta) + log_gamma(a) -
           a * std::log(b);
  }

  MeanParams mean_params(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double a = shape(th), b = rate(th);
    const double precision = a / b;  // E[1/v]
    const double m0 = th.xi[0] / th.eta;
    Eigen::VectorXd m(4);
    m[0] = precision * m0;                                     // E[mu/v]
    m[1] = -0.5 * precision;                                   // E[-1/(2v)]
    m[2] = -0.5 * (kLog2Pi + std::log(b) - digamma(a));        // E[-0.5 log(2 pi v)]
    m[3] = -0.5 * (m0 * m0 * precision + 1.0 / th.eta);        // E[-mu^2/(2v)]
    return {m};
  }

  SufficientStats suff_stats(Observation x) const {
    if (!std::isfinite(x)) throw std::domain_error("gaussian-nig: non-finite observation");
    Eigen::VectorXd t(3);
    t << x, x * x, 1.0;
    return {t, 1.0};
  }
};

}  // namespace hafvf
