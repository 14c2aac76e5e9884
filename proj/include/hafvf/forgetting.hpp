#pragma once

// Beta-distributed forgetting level. The mixture prior over the level below
// is not conjugate to a Beta, so the posterior (alpha, beta) is found by a
// damped non-conjugate message-passing fixed point. One iteration assembles
// three increments on top of the weighted prior:
//   u1 = +/- K * dL   agreement between the new posterior and the carried one
//   u2 = +/- K * dC   third-derivative correction from the variance of w
//   u3 = dV           pull toward lower posterior variance of w
// and resets to a configurable strong value whenever the raw update would
// leave the valid region.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "hafvf/beta_params.hpp"
#include "hafvf/errors.hpp"
#include "hafvf/family.hpp"
#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

struct ForgettingIncrements {
  double dL = 0.0;
  double dC = 0.0;
  double dV_alpha = 0.0;
  double dV_beta = 0.0;
  double u1_alpha = 0.0, u1_beta = 0.0;
  double u2_alpha = 0.0, u2_beta = 0.0;
  double u3_alpha = 0.0, u3_beta = 0.0;
};

struct NcvmpControls {
  int max_iters = 100;
  double tol = 1e-6;
  double damping = 0.5;
  BetaParams reset_value{10.0, 10.0};

  void validate() const {
    if (max_iters < 1) throw config_error("controls: max_iters must be >= 1");
    if (!(tol > 0.0)) throw config_error("controls: tol must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) {
      throw config_error("controls: damping must lie in (0,1]");
    }
    if (!reset_value.valid()) throw config_error("controls: reset value must be a valid Beta");
  }
};

// dL = (E_q[T(z)] - E_prior[T(z)])^T (theta_prev - theta_naive), the slope of
// the expected log prior density of z with respect to the forgetting mean.
inline double compute_dL(const MeanParams& q_mean, const MeanParams& prior_mean,
                         const NaturalParams& delta_theta) {
  const Eigen::VectorXd delta = delta_theta.full();
  if (q_mean.m.size() != delta.size() || prior_mean.m.size() != delta.size()) {
    throw std::invalid_argument("compute_dL: dimension mismatch");
  }
  return (q_mean.m - prior_mean.m).dot(delta);
}

inline double compute_dC(double var_w, double d3) { return -0.5 * var_w * d3; }

// dV = -(d2/2) S^{-1} grad Var[w], with S the 2x2 covariance of
// [log w, log(1-w)] under Beta(phi). Throws when S is numerically singular;
// the solver downgrades that to a zeroed increment.
inline std::pair<double, double> compute_dV(const BetaParams& phi, double d2) {
  if (!phi.valid()) throw std::domain_error("compute_dV: invalid Beta parameters");
  const double s = phi.alpha + phi.beta;
  const double t_ab = trigamma(s);
  const double s11 = trigamma(phi.alpha) - t_ab;
  const double s22 = trigamma(phi.beta) - t_ab;
  const double s12 = -t_ab;
  const double det = s11 * s22 - s12 * s12;
  if (!(det > 1e-12)) {
    throw numerical_error("compute_dV: log-statistic covariance is numerically singular");
  }
  const double v = phi.variance();
  const double common = -2.0 / s - 1.0 / (s + 1.0);
  const double g_alpha = v * (1.0 / phi.alpha + common);
  const double g_beta = v * (1.0 / phi.beta + common);
  const double scale = -0.5 * d2 / det;
  return {scale * (s22 * g_alpha - s12 * g_beta), scale * (-s12 * g_alpha + s11 * g_beta)};
}

// K(alpha,beta) and K(beta,alpha): the projection of the mean-direction onto
// the natural parameters, K(x,y) = (M x + L(y) y) / ((L(x)L(y) - M^2)(x+y)^2)
// with L(x) = psi_1(x) + M and M = -psi_1(x+y). Both are strictly positive
// for valid parameters.
inline std::pair<double, double> ncvmp_kernel(const BetaParams& phi) {
  if (!phi.valid()) throw std::domain_error("ncvmp_kernel: invalid Beta parameters");
  const double x = phi.alpha, y = phi.beta;
  const double m = -trigamma(x + y);
  const double lx = trigamma(x) + m;
  const double ly = trigamma(y) + m;
  const double det = lx * ly - m * m;
  const double denom = det * (x + y) * (x + y);
  if (!(std::abs(denom) > 1e-300) || !std::isfinite(denom)) {
    throw numerical_error("ncvmp_kernel: denominator underflow");
  }
  return {(m * x + ly * y) / denom, (m * y + lx * x) / denom};
}

// One damped fixed-point step. Returns the reset value with a raised flag if
// the undamped right-hand side leaves the valid region (or is non-finite).
inline std::pair<BetaParams, bool> update_phi(const BetaParams& phi_weighted_prior,
                                              const ForgettingIncrements& inc,
                                              const BetaParams& phi_current,
                                              const NcvmpControls& controls) {
  const double rhs_alpha = phi_weighted_prior.alpha + inc.u1_alpha + inc.u2_alpha + inc.u3_alpha;
  const double rhs_beta = phi_weighted_prior.beta + inc.u1_beta + inc.u2_beta + inc.u3_beta;
  if (!std::isfinite(rhs_alpha) || !std::isfinite(rhs_beta) || rhs_alpha <= 0.0 ||
      rhs_beta <= 0.0) {
    return {controls.reset_value, true};
  }
  const double lam = controls.damping;
  return {BetaParams((1.0 - lam) * phi_current.alpha + lam * rhs_alpha,
                     (1.0 - lam) * phi_current.beta + lam * rhs_beta),
          false};
}

struct NcvmpResult {
  BetaParams phi;
  ForgettingIncrements increments;
  int iterations = 0;
  int reset_count = 0;
  bool converged = false;
  int dv_warnings = 0;
};

// Solve for the Beta posterior of one forgetting level. `family` describes
// the level below (its carried posterior `prev`, naive prior `naive`, and the
// mean statistics `q_mean` of its current variational posterior);
// `weighted_prior` is this level's own mixed prior and `init` the warm start.
template <ConjugateFamily F>
NcvmpResult ncvmp_solve(const F& family, const NaturalParams& prev, const NaturalParams& naive,
                        const MeanParams& q_mean, const BetaParams& phi_weighted,
                        const BetaParams& init, const NcvmpControls& controls) {
  if (!phi_weighted.valid() || !init.valid()) {
    throw std::domain_error("ncvmp_solve: invalid Beta inputs");
  }
  NcvmpResult res;
  res.phi = init;
  NaturalParams delta;
  delta.xi = prev.xi - naive.xi;
  delta.eta = prev.eta - naive.eta;
  const bool degenerate_segment = delta.full().lpNorm<Eigen::Infinity>() == 0.0;

  for (int iter = 1; iter <= controls.max_iters; ++iter) {
    res.iterations = iter;
    ForgettingIncrements inc;
    if (!degenerate_segment) {
      const double w_hat = res.phi.mean();
      const double var_w = res.phi.variance();
      const NaturalParams mixed = weighted_prior(prev, naive, w_hat);
      inc.dL = compute_dL(q_mean, family.mean_params(mixed), delta);
      const SegmentDerivs derivs = b_directional_derivs(family, prev, naive, w_hat);
      inc.dC = compute_dC(var_w, derivs.d3);
      const double d2 = std::max(derivs.d2, 0.0);
      try {
        std::tie(inc.dV_alpha, inc.dV_beta) = compute_dV(res.phi, d2);
      } catch (const numerical_error&) {
        ++res.dv_warnings;
        inc.dV_alpha = inc.dV_beta = 0.0;
      }
      const auto [k_ab, k_ba] = ncvmp_kernel(res.phi);
      inc.u1_alpha = k_ab * inc.dL;
      inc.u1_beta = -k_ba * inc.dL;
      inc.u2_alpha = k_ab * inc.dC;
      inc.u2_beta = -k_ba * inc.dC;
      inc.u3_alpha = inc.dV_alpha;
      inc.u3_beta = inc.dV_beta;
    }
    res.increments = inc;

    const auto [next, reset] = update_phi(phi_weighted, inc, res.phi, controls);
    if (reset) {
      ++res.reset_count;
      res.phi = next;
      continue;
    }
    const double change =
        std::max(std::abs(next.alpha - res.phi.alpha), std::abs(next.beta - res.phi.beta));
    res.phi = next;
    if (change < controls.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

namespace detail {

template <ConjugateFamily F>
Eigen::VectorXd natural_offset_of(const F& f) {
  if constexpr (requires { f.natural_offset(); }) {
    return f.natural_offset();
  } else {
    return Eigen::VectorXd::Zero(f.xi_dim() + 1);
  }
}

}  // namespace detail

// Approximate contribution of one forgetting level to the evidence bound:
// the expected log prior of the level below (second-order in w around its
// mean), the cross-entropy against the weighted Beta prior, and the entropy
// of q(w). Used to check that the fixed point actually maximizes the bound.
template <ConjugateFamily F>
double approx_elbo_w_term(const F& family, const BetaParams& phi, const NaturalParams& theta_prev,
                          const NaturalParams& theta_naive, const MeanParams& q_z_mean,
                          const BetaParams& phi_weighted_prior) {
  if (!phi.valid() || !phi_weighted_prior.valid()) {
    throw std::domain_error("approx_elbo_w_term: invalid Beta parameters");
  }
  const double w_hat = phi.mean();
  const double var_w = phi.variance();
  const NaturalParams mixed = weighted_prior(theta_prev, theta_naive, w_hat);
  const SegmentDerivs derivs = b_directional_derivs(family, theta_prev, theta_naive, w_hat);
  const Eigen::VectorXd offset = detail::natural_offset_of(family);
  const double expected_log_prior = q_z_mean.m.dot(mixed.full() - offset) -
                                    family.log_partition(mixed) - 0.5 * var_w * derivs.d2;
  const auto [ml_w, ml_1mw] = phi.mean_log_stats();
  const double cross_entropy = (phi_weighted_prior.alpha - 1.0) * ml_w +
                               (phi_weighted_prior.beta - 1.0) * ml_1mw -
                               log_beta(phi_weighted_prior.alpha, phi_weighted_prior.beta);
  return expected_log_prior + cross_entropy + phi.entropy();
}

}  // namespace hafvf
