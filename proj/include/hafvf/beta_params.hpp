#pragma once

// Beta(alpha, beta) parameter pair for a forgetting level, with the moments
// and expected log-statistics the update equations need.

#include <cmath>
#include <utility>

#include "hafvf/errors.hpp"
#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  BetaParams() = default;
  BetaParams(double a, double b) : alpha(a), beta(b) {}

  bool valid() const {
    return std::isfinite(alpha) && std::isfinite(beta) && alpha > 0.0 && beta > 0.0;
  }

  double mean() const { return alpha / (alpha + beta); }

  double variance() const {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }

  // E[log w] and E[log(1-w)].
  std::pair<double, double> mean_log_stats() const {
    const double ds = digamma(alpha + beta);
    return {digamma(alpha) - ds, digamma(beta) - ds};
  }

  double entropy() const {
    const double s = alpha + beta;
    return log_beta(alpha, beta) - (alpha - 1.0) * digamma(alpha) -
           (beta - 1.0) * digamma(beta) + (s - 2.0) * digamma(s);
  }

  NaturalParams to_natural() const {
    Eigen::VectorXd xi(2);
    xi << alpha, beta;
    return NaturalParams(xi, alpha + beta);
  }

  static BetaParams from_natural(const NaturalParams& p) {
    if (p.xi.size() != 2) throw std::invalid_argument("BetaParams::from_natural: expected 2 components");
    return BetaParams(p.xi[0], p.xi[1]);
  }
};

inline std::pair<double, double> beta_mean_var(const BetaParams& phi) {
  if (!phi.valid()) throw std::domain_error("beta_mean_var: invalid Beta parameters");
  return {phi.mean(), phi.variance()};
}

// phi_hat = b * (phi_prev - phi_naive) + phi_naive, componentwise.
inline BetaParams weighted_prior(const BetaParams& prev, const BetaParams& naive, double b) {
  if (!(b >= 0.0 && b <= 1.0)) {
    throw std::invalid_argument("weighted_prior: weight must lie in [0,1]");
  }
  return BetaParams(b * prev.alpha + (1.0 - b) * naive.alpha,
                    b * prev.beta + (1.0 - b) * naive.beta);
}

}  // namespace hafvf
