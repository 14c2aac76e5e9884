#pragma once

// Contract every conjugate exponential family implements, plus generic
// operations that only need that contract: the posterior-predictive density
// and the derivatives of the log-partition along the prior mixing segment
// vartheta(w) = w theta_prev + (1-w) theta_naive.

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <string_view>

#include "hafvf/errors.hpp"
#include "hafvf/natural_params.hpp"

namespace hafvf {

template <class F>
concept ConjugateFamily = requires(const F f, const NaturalParams& th,
                                   const typename F::Observation& x) {
  typename F::Observation;
  { f.xi_dim() } -> std::convertible_to<Eigen::Index>;
  { f.valid(th) } -> std::convertible_to<bool>;
  { f.log_partition(th) } -> std::convertible_to<double>;
  { f.mean_params(th) } -> std::convertible_to<MeanParams>;
  { f.suff_stats(x) } -> std::convertible_to<SufficientStats>;
  { f.name() } -> std::convertible_to<std::string_view>;
};

// Families whose log-partition has a closed-form second derivative along a
// mixing segment can expose it and skip one finite-difference stencil.
template <class F>
concept HasExactSegmentCurvature = requires(const F f, const NaturalParams& at,
                                            const NaturalParams& delta) {
  { f.segment_curvature(at, delta) } -> std::convertible_to<double>;
};

template <ConjugateFamily F>
void require_valid(const F& f, const NaturalParams& theta, const char* where) {
  if (!f.valid(theta)) {
    throw std::domain_error(std::string(where) + ": invalid " + std::string(f.name()) +
                            " parameters");
  }
}

// Log posterior-predictive mass/density of a batch of observations summarized
// by `stats`. The four shipped families carry their full log-density in the
// statistic pairing (unit base measure), so this is a plain log-partition
// difference.
template <ConjugateFamily F>
double log_predictive(const F& f, const NaturalParams& theta, const SufficientStats& stats) {
  require_valid(f, theta, "log_predictive");
  return f.log_partition(update_theta(theta, stats)) - f.log_partition(theta);
}

template <ConjugateFamily F>
double log_predictive(const F& f, const NaturalParams& theta, const typename F::Observation& x) {
  return log_predictive(f, theta, f.suff_stats(x));
}

// First three derivatives of g(w) = B(w theta_prev + (1-w) theta_naive).
// d2 equals delta_theta^T Cov(T(z)|vartheta) delta_theta and is nonnegative
// up to stencil noise; d3 drives the posterior-variance correction.
struct SegmentDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

namespace detail {

// g'(w) evaluated exactly from the closed-form mean parameters.
template <ConjugateFamily F>
double segment_slope(const F& f, const NaturalParams& prev, const NaturalParams& naive,
                     const Eigen::VectorXd& delta_full, double w) {
  const NaturalParams at = weighted_prior(prev, naive, w);
  return f.mean_params(at).m.dot(delta_full);
}

template <ConjugateFamily F>
bool segment_point_ok(const F& f, const NaturalParams& prev, const NaturalParams& naive,
                      double w) {
  if (!(w >= 0.0 && w <= 1.0)) return false;
  return f.valid(weighted_prior(prev, naive, w));
}

}  // namespace detail

template <ConjugateFamily F>
SegmentDerivs b_directional_derivs(const F& f, const NaturalParams& theta_prev,
                                   const NaturalParams& theta_naive, double w_hat) {
  require_valid(f, theta_prev, "b_directional_derivs");
  require_valid(f, theta_naive, "b_directional_derivs");
  if (!(w_hat >= 0.0 && w_hat <= 1.0)) {
    throw std::invalid_argument("b_directional_derivs: w must lie in [0,1]");
  }

  const Eigen::VectorXd delta_full = theta_prev.full() - theta_naive.full();
  SegmentDerivs out;
  if (delta_full.lpNorm<Eigen::Infinity>() == 0.0) return out;

  const auto slope = [&](double w) {
    return detail::segment_slope(f, theta_prev, theta_naive, delta_full, w);
  };
  out.d1 = slope(w_hat);

  // Pick a stencil width that keeps all evaluation points inside the valid
  // segment; fall back to a one-sided stencil near the endpoints.
  double h = 1e-3;
  bool central = false;
  for (int attempt = 0; attempt < 20; ++attempt) {
    if (detail::segment_point_ok(f, theta_prev, theta_naive, w_hat - h) &&
        detail::segment_point_ok(f, theta_prev, theta_naive, w_hat + h)) {
      central = true;
      break;
    }
    h *= 0.5;
  }

  if (central) {
    if constexpr (HasExactSegmentCurvature<F>) {
      // Exact curvature at the stencil points gives an accurate third
      // derivative without needing a third polygamma order.
      const NaturalParams delta = NaturalParams::from_full(delta_full);
      const auto curv = [&](double w) {
        return f.segment_curvature(weighted_prior(theta_prev, theta_naive, w), delta);
      };
      out.d2 = curv(w_hat);
      const double d3_h = (curv(w_hat + h) - curv(w_hat - h)) / (2.0 * h);
      const double d3_h2 = (curv(w_hat + 0.5 * h) - curv(w_hat - 0.5 * h)) / h;
      out.d3 = (4.0 * d3_h2 - d3_h) / 3.0;  // Richardson, O(h^4)
    } else {
      const double sp1 = slope(w_hat + h), sm1 = slope(w_hat - h);
      const double sp2 = slope(w_hat + 0.5 * h), sm2 = slope(w_hat - 0.5 * h);
      const double d2_h = (sp1 - sm1) / (2.0 * h);
      const double d2_h2 = (sp2 - sm2) / h;
      out.d2 = (4.0 * d2_h2 - d2_h) / 3.0;
      const double s0 = out.d1;
      const double d3_h = (sp1 - 2.0 * s0 + sm1) / (h * h);
      const double d3_h2 = (sp2 - 2.0 * s0 + sm2) / (0.25 * h * h);
      out.d3 = (4.0 * d3_h2 - d3_h) / 3.0;
    }
  } else {
    // One-sided: the segment is pinched against an endpoint. Use forward or
    // backward differences of g' with the largest width that stays valid.
    const double dir = (w_hat < 0.5) ? 1.0 : -1.0;
    double hs = 1e-4;
    while (hs > 1e-9 &&
           !(detail::segment_point_ok(f, theta_prev, theta_naive, w_hat + dir * hs) &&
             detail::segment_point_ok(f, theta_prev, theta_naive, w_hat + 2.0 * dir * hs))) {
      hs *= 0.5;
    }
    const double s0 = out.d1;
    const double s1 = slope(w_hat + dir * hs);
    const double s2 = slope(w_hat + 2.0 * dir * hs);
    out.d2 = dir * (-1.5 * s0 + 2.0 * s1 - 0.5 * s2) / hs;
    out.d3 = (s2 - 2.0 * s1 + s0) / (hs * hs);
  }

  if (!std::isfinite(out.d1) || !std::isfinite(out.d2) || !std::isfinite(out.d3)) {
    throw numerical_error("b_directional_derivs: non-finite derivative");
  }
  return out;
}

}  // namespace hafvf
