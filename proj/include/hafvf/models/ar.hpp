#pragma once

// Adaptive autoregressive model: each sample is regressed on its previous
// `order` samples through the linear-regression family, so the coefficient
// posterior tracks regime changes while the forgetting hierarchy absorbs
// isolated artifacts.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hafvf/errors.hpp"
#include "hafvf/families/linreg_nig.hpp"
#include "hafvf/filter.hpp"

namespace hafvf {

enum class Smoothing { Forward, ForwardBackward };

struct ArConfig {
  int order = 10;
  bool intercept = false;
  Smoothing smoothing = Smoothing::Forward;
  HierarchyConfig<LinRegNig> hierarchy;

  int regressor_dim() const { return order + (intercept ? 1 : 0); }

  void validate() const {
    if (order < 1) throw config_error("ar: order must be >= 1");
    if (hierarchy.family.order() != regressor_dim()) {
      throw config_error("ar: hierarchy family dimension does not match the model order");
    }
    hierarchy.validate();
  }
};

// Priors follow the artifact-robust setup: strong w-prior, flat b-prior,
// frozen top level, ridge prior on the coefficients.
inline ArConfig make_ar_config(int order, bool intercept = false,
                               Smoothing smoothing = Smoothing::Forward) {
  const int dim = order + (intercept ? 1 : 0);
  LinRegNig fam(dim);
  ArConfig cfg{order, intercept, smoothing,
               HierarchyConfig<LinRegNig>{fam, fam.ridge_prior(1.0, 2.0, 0.2)}};
  cfg.hierarchy.phi0 = BetaParams(4.5, 0.5);
  cfg.hierarchy.beta0 = BetaParams(1.0, 1.0);
  cfg.hierarchy.gamma = 1.0;
  cfg.hierarchy.levels = 3;
  return cfg;
}

struct ArStepSummary {
  long t = 0;  // index of the predicted sample within the signal
  Eigen::VectorXd coef_mean;
  Eigen::VectorXd coef_var;
  double noise_var_mean = 0.0;
  StepDiagnostics diag;
};

struct ArFit {
  std::vector<ArStepSummary> steps;
  std::vector<NaturalParams> posteriors;  // per-step posterior parameters
};

inline std::vector<SufficientStats> ar_design(const LinRegNig& fam, int order, bool intercept,
                                              const std::vector<double>& signal) {
  const int dim = order + (intercept ? 1 : 0);
  std::vector<SufficientStats> stats;
  stats.reserve(signal.size() - order);
  for (std::size_t t = order; t < signal.size(); ++t) {
    RegressionObs obs;
    obs.u.resize(dim);
    for (int j = 0; j < order; ++j) obs.u[j] = signal[t - 1 - j];
    if (intercept) obs.u[order] = 1.0;
    obs.y = signal[t];
    stats.push_back(fam.suff_stats(obs));
  }
  return stats;
}

inline ArFit ar_fit(const ArConfig& config, const std::vector<double>& signal) {
  config.validate();
  if (static_cast<long>(signal.size()) <= config.order) {
    throw input_error("ar: signal length " + std::to_string(signal.size()) +
                      " must exceed the model order " + std::to_string(config.order));
  }
  const LinRegNig& fam = config.hierarchy.family;
  const auto stats = ar_design(fam, config.order, config.intercept, signal);
  AdaptiveFilter<LinRegNig> filter(config.hierarchy);

  ArFit fit;
  fit.steps.reserve(stats.size());
  fit.posteriors.reserve(stats.size());

  const auto summarize = [&](long t, const NaturalParams& theta, const StepDiagnostics& diag) {
    ArStepSummary s;
    s.t = t;
    s.coef_mean = fam.coef_mean(theta);
    s.coef_var = fam.coef_var(theta);
    s.noise_var_mean = fam.noise_var_mean(theta);
    s.diag = diag;
    return s;
  };

  if (config.smoothing == Smoothing::Forward) {
    const auto trace = filter.run(stats);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      fit.posteriors.push_back(trace[i].first.theta);
      fit.steps.push_back(
          summarize(static_cast<long>(i) + config.order, trace[i].first.theta, trace[i].second));
    }
  } else {
    const auto fb = filter.forward_backward(stats);
    for (std::size_t i = 0; i < fb.combined.size(); ++i) {
      fit.posteriors.push_back(fb.combined[i]);
      fit.steps.push_back(
          summarize(static_cast<long>(i) + config.order, fb.combined[i], fb.forward[i].second));
    }
  }
  return fit;
}

struct ArPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

// Iterated one-step predictions from a fitted coefficient posterior. The
// variance recursion propagates both the noise level and the coefficient
// uncertainty through the predicted lags.
inline std::vector<ArPrediction> ar_predict(const LinRegNig& fam, const NaturalParams& theta,
                                            const std::vector<double>& recent, int horizon,
                                            bool intercept = false) {
  if (horizon < 0) throw std::invalid_argument("ar_predict: negative horizon");
  const int p = fam.order() - (intercept ? 1 : 0);
  if (static_cast<int>(recent.size()) < p) {
    throw input_error("ar_predict: need at least " + std::to_string(p) + " recent samples");
  }
  require_valid(fam, theta, "ar_predict");

  Eigen::LLT<Eigen::MatrixXd> llt(fam.precision(theta));
  const Eigen::MatrixXd pinv = llt.solve(Eigen::MatrixXd::Identity(fam.order(), fam.order()));
  const Eigen::VectorXd coef = fam.coef_mean(theta);
  const double shape = fam.shape(theta);
  const double noise = fam.noise_var_mean(theta);
  const Eigen::MatrixXd coef_cov =
      (shape > 1.0 ? fam.rate(theta) / (shape - 1.0) : fam.rate(theta) / shape) * pinv;

  std::vector<double> history(recent.end() - p, recent.end());
  std::vector<ArPrediction> out;
  std::vector<double> vars;
  out.reserve(horizon);
  for (int h = 0; h < horizon; ++h) {
    Eigen::VectorXd u(fam.order());
    for (int j = 0; j < p; ++j) u[j] = history[history.size() - 1 - j];
    if (intercept) u[p] = 1.0;
    ArPrediction pr;
    pr.mean = coef.dot(u);
    pr.variance = noise + u.dot(coef_cov * u);
    for (int j = 1; j <= std::min<int>(h, p); ++j) {
      pr.variance += coef[j - 1] * coef[j - 1] * vars[h - j];
    }
    history.push_back(pr.mean);
    vars.push_back(pr.variance);
    out.push_back(pr);
  }
  return out;
}

}  // namespace hafvf
