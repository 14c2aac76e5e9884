#pragma once

// Running estimate of a drifting multivariate Gaussian: wraps the filter
// around the Normal-Inverse-Wishart family and reports posterior mean,
// expected covariance, effective memory and a credible radius per dimension.

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <vector>

#include "hafvf/families/gaussian_niw.hpp"
#include "hafvf/filter.hpp"

namespace hafvf {

inline double student_t_quantile(double prob, double dof) {
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, prob);
}

struct TrackPoint {
  long t = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;        // E[Sigma] when defined, else scaled scale matrix
  double kappa = 0.0;         // effective memory
  double e_w = 1.0;
  double eta_asymptote = 0.0;
  double log_pred = 0.0;
  Eigen::VectorXd ci_radius;  // 95% marginal credible radius of the mean
};

inline std::vector<TrackPoint> track_distribution(const HierarchyConfig<GaussianNiw>& config,
                                                  const std::vector<Eigen::VectorXd>& xs,
                                                  bool smoothed = false) {
  config.validate();
  const GaussianNiw& fam = config.family;
  std::vector<SufficientStats> stats;
  stats.reserve(xs.size());
  for (const auto& x : xs) {
    if (x.size() != fam.dim()) {
      throw input_error("track_distribution: observation dimension " + std::to_string(x.size()) +
                        " does not match family dimension " + std::to_string(fam.dim()));
    }
    stats.push_back(fam.suff_stats(x));
  }
  AdaptiveFilter<GaussianNiw> filter(config);

  const auto summarize = [&](long t, const NaturalParams& theta, double e_w, double asym,
                             double log_pred) {
    TrackPoint p;
    p.t = t;
    p.mean = fam.mean(theta);
    const double nu = fam.dof(theta);
    const Eigen::MatrixXd psi = fam.psi(theta);
    const int d = fam.dim();
    p.cov = (nu > d + 1.0) ? Eigen::MatrixXd(psi / (nu - d - 1.0))
                           : Eigen::MatrixXd(psi / std::max(nu, 1.0));
    p.kappa = fam.kappa(theta);
    p.e_w = e_w;
    p.eta_asymptote = asym;
    p.log_pred = log_pred;
    const double tdof = nu - d + 1.0;
    p.ci_radius.resize(d);
    if (tdof > 0.0) {
      const double q = student_t_quantile(0.975, tdof);
      for (int j = 0; j < d; ++j) {
        p.ci_radius[j] = q * std::sqrt(psi(j, j) / (p.kappa * tdof));
      }
    } else {
      p.ci_radius.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    return p;
  };

  std::vector<TrackPoint> out;
  out.reserve(xs.size());
  if (!smoothed) {
    const auto trace = filter.run(stats);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& [state, diag] = trace[i];
      out.push_back(summarize(static_cast<long>(i) + 1, state.theta, diag.e_w,
                              diag.eta_asymptote, diag.log_pred));
    }
  } else {
    const auto fb = filter.forward_backward(stats);
    for (std::size_t i = 0; i < fb.combined.size(); ++i) {
      const auto& diag = fb.forward[i].second;
      out.push_back(summarize(static_cast<long>(i) + 1, fb.combined[i], diag.e_w,
                              diag.eta_asymptote, diag.log_pred));
    }
  }
  return out;
}

}  // namespace hafvf
