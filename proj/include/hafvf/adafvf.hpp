#pragma once

// Gradient optimizer built on the adaptive forgetting hierarchy: every
// parameter group carries two filter stacks over its coordinates, one for
// raw gradients (decay w1) and one for squared gradients (decay w2), with
// w1 <= w2 enforced after every step. The update normalizes the posterior
// gradient mean by the posterior second-moment scale. An isolated degenerate
// gradient batch drops the expected forgetting factor and flushes the
// contaminated history instead of polluting a long moving average.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hafvf/errors.hpp"
#include "hafvf/families/nig_vector.hpp"
#include "hafvf/filter.hpp"
#include "hafvf/rng.hpp"

namespace hafvf {

struct OptimizerConfig {
  double step_size = 1e-3;
  double epsilon = 1e-8;
  BetaParams phi1_0{9.0, 1.0};   // forgetting prior of the gradient-mean stack
  BetaParams phi2_0{9.5, 0.5};   // forgetting prior of the second-moment stack
  BetaParams beta0{1.0, 1.0};
  double gamma = 1.0;
  int levels = 3;                // 1 = fixed decays (moving-average baseline)
  double fixed_w1 = 0.9;
  double fixed_w2 = 0.999;
  double prior_kappa = 0.1;
  double prior_shape = 1.5;
  double prior_rate = 0.5;
  NcvmpControls controls;
  int max_sweeps = 20;

  void validate() const {
    if (!(step_size > 0.0)) throw config_error("optimizer: step_size must be positive");
    if (!(epsilon > 0.0)) throw config_error("optimizer: epsilon must be positive");
    if (!phi1_0.valid() || !phi2_0.valid() || !beta0.valid()) {
      throw config_error("optimizer: forgetting priors must be valid Beta parameters");
    }
    if (levels == 1 && fixed_w1 > fixed_w2) {
      throw config_error("optimizer: fixed_w1 must not exceed fixed_w2");
    }
    if (!(prior_kappa > 0.0 && prior_shape > 0.0 && prior_rate > 0.0)) {
      throw config_error("optimizer: gradient priors must be positive");
    }
    controls.validate();
  }
};

class AdaFvf {
 public:
  struct GroupInfo {
    double e_w1 = 1.0;
    double e_w2 = 1.0;
    bool rejected = false;
  };

  AdaFvf(int dim, std::vector<std::vector<int>> groups, OptimizerConfig config)
      : dim_(dim), cfg_(std::move(config)) {
    cfg_.validate();
    if (dim < 1) throw config_error("optimizer: dimension must be >= 1");
    if (groups.empty()) throw config_error("optimizer: need at least one parameter group");
    std::vector<bool> seen(dim, false);
    for (auto& idx : groups) {
      if (idx.empty()) throw config_error("optimizer: empty parameter group");
      for (int k : idx) {
        if (k < 0 || k >= dim || seen[k]) {
          throw config_error("optimizer: group indices must partition [0, dim)");
        }
        seen[k] = true;
      }
      groups_.push_back(make_group(std::move(idx)));
    }
    for (bool s : seen) {
      if (!s) throw config_error("optimizer: group indices must cover every coordinate");
    }
    info_.resize(groups_.size());
  }

  AdaFvf(int dim, OptimizerConfig config)
      : AdaFvf(dim, {single_group(dim)}, std::move(config)) {}

  int dim() const { return dim_; }
  long rejected() const { return rejected_; }
  const std::vector<GroupInfo>& group_info() const { return info_; }

  // Consume one gradient sample and return the parameter update to apply.
  Eigen::VectorXd step(const Eigen::VectorXd& grad) {
    if (grad.size() != dim_) throw std::invalid_argument("optimizer: gradient dimension mismatch");
    Eigen::VectorXd update = Eigen::VectorXd::Zero(dim_);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      Group& grp = groups_[g];
      const int n = static_cast<int>(grp.idx.size());
      Eigen::VectorXd gvec(n);
      for (int i = 0; i < n; ++i) gvec[i] = grad[grp.idx[i]];

      if (gvec.allFinite()) {
        grp.mean_state = grp.mean_filter.step(grp.mean_state, grp.family.suff_stats(gvec)).first;
        grp.var_state =
            grp.var_filter.step(grp.var_state, grp.family.suff_stats(gvec.cwiseProduct(gvec)))
                .first;
        info_[g].rejected = false;
      } else {
        grp.mean_state = grp.mean_filter.prior_only_step(grp.mean_state);
        grp.var_state = grp.var_filter.prior_only_step(grp.var_state);
        info_[g].rejected = true;
        ++rejected_;
      }

      enforce_decay_order(grp);
      info_[g].e_w1 = expected_w(grp.mean_filter, grp.mean_state, cfg_.fixed_w1);
      info_[g].e_w2 = expected_w(grp.var_filter, grp.var_state, cfg_.fixed_w2);

      const Eigen::VectorXd m_hat = grp.family.means(grp.mean_state.theta);
      const Eigen::VectorXd v_hat = grp.family.means(grp.var_state.theta).cwiseMax(0.0);
      for (int i = 0; i < n; ++i) {
        update[grp.idx[i]] = -cfg_.step_size * m_hat[i] / (std::sqrt(v_hat[i]) + cfg_.epsilon);
      }
    }
    return update;
  }

 private:
  struct Group {
    std::vector<int> idx;
    NigVector family;
    AdaptiveFilter<NigVector> mean_filter;
    AdaptiveFilter<NigVector> var_filter;
    FilterState mean_state;
    FilterState var_state;
  };

  static std::vector<int> single_group(int dim) {
    std::vector<int> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = i;
    return idx;
  }

  HierarchyConfig<NigVector> stack_config(const NigVector& fam, const BetaParams& phi0,
                                          double fixed_w, double prior_mean) const {
    HierarchyConfig<NigVector> h{fam,
                                 fam.from_moments(prior_mean, cfg_.prior_kappa, cfg_.prior_shape,
                                                  cfg_.prior_rate)};
    h.phi0 = phi0;
    h.beta0 = cfg_.beta0;
    h.gamma = cfg_.gamma;
    h.levels = cfg_.levels;
    h.fixed_w = fixed_w;
    h.controls = cfg_.controls;
    h.max_sweeps = cfg_.max_sweeps;
    return h;
  }

  Group make_group(std::vector<int> idx) const {
    NigVector fam(static_cast<int>(idx.size()));
    AdaptiveFilter<NigVector> mean_filter(stack_config(fam, cfg_.phi1_0, cfg_.fixed_w1, 0.0));
    AdaptiveFilter<NigVector> var_filter(stack_config(fam, cfg_.phi2_0, cfg_.fixed_w2, 0.0));
    FilterState ms = mean_filter.init();
    FilterState vs = var_filter.init();
    return Group{std::move(idx), fam, std::move(mean_filter), std::move(var_filter),
                 std::move(ms), std::move(vs)};
  }

  static double expected_w(const AdaptiveFilter<NigVector>& filter, const FilterState& state,
                           double fixed) {
    return filter.config().levels == 1 ? fixed : state.phi.mean();
  }

  // Rescale the mean stack's forgetting posterior (at fixed strength) so its
  // expectation never exceeds the second-moment stack's.
  void enforce_decay_order(Group& grp) {
    if (cfg_.levels == 1) return;
    const double e1 = grp.mean_state.phi.mean();
    const double e2 = grp.var_state.phi.mean();
    if (e1 > e2) {
      const double strength = grp.mean_state.phi.alpha + grp.mean_state.phi.beta;
      grp.mean_state.phi = BetaParams(e2 * strength, (1.0 - e2) * strength);
    }
  }

  int dim_;
  OptimizerConfig cfg_;
  std::vector<Group> groups_;
  std::vector<GroupInfo> info_;
  long rejected_ = 0;
};

// Desk-scale comparison objective: a noisy quadratic bowl with scheduled
// outlier gradients. The same seed produces the same noise and outlier
// schedule for any optimizer configuration, so runs pair cleanly.
struct QuadraticTestbed {
  Eigen::VectorXd curvature;
  Eigen::VectorXd target;
  Eigen::VectorXd x0;
  double grad_noise_sigma = 0.5;
  double outlier_prob = 0.0;
  double outlier_scale = 100.0;
  int iterations = 500;
  std::uint64_t seed = 1;

  void validate() const {
    if (curvature.size() < 1 || curvature.size() != target.size() ||
        curvature.size() != x0.size()) {
      throw config_error("testbed: curvature/target/x0 dimensions must match");
    }
    if (!(curvature.array() > 0.0).all()) throw config_error("testbed: curvature must be positive");
    if (iterations < 0) throw config_error("testbed: iterations must be >= 0");
    if (!(outlier_prob >= 0.0 && outlier_prob <= 1.0)) {
      throw config_error("testbed: outlier_prob must lie in [0,1]");
    }
  }

  double loss(const Eigen::VectorXd& x) const {
    return 0.5 * (curvature.array() * (x - target).array().square()).sum();
  }
};

struct TestbedTrace {
  std::vector<double> loss;
  std::vector<double> e_w1;
  std::vector<double> e_w2;
  std::vector<long> outlier_steps;
  double final_loss = 0.0;  // mean loss over the last tenth of the run
};

inline TestbedTrace train_testbed(const QuadraticTestbed& tb, const OptimizerConfig& cfg) {
  tb.validate();
  const int d = static_cast<int>(tb.curvature.size());
  AdaFvf opt(d, cfg);
  Rng rng(tb.seed);
  Eigen::VectorXd x = tb.x0;

  TestbedTrace trace;
  trace.loss.reserve(tb.iterations);
  for (int it = 0; it < tb.iterations; ++it) {
    Eigen::VectorXd grad = tb.curvature.cwiseProduct(x - tb.target);
    for (int i = 0; i < d; ++i) grad[i] += rng.normal(0.0, tb.grad_noise_sigma);
    if (rng.uniform() < tb.outlier_prob) {
      grad *= tb.outlier_scale;
      trace.outlier_steps.push_back(it);
    }
    x += opt.step(grad);
    trace.loss.push_back(tb.loss(x));
    trace.e_w1.push_back(opt.group_info()[0].e_w1);
    trace.e_w2.push_back(opt.group_info()[0].e_w2);
  }
  if (!trace.loss.empty()) {
    const std::size_t tail = std::max<std::size_t>(1, trace.loss.size() / 10);
    double sum = 0.0;
    for (std::size_t i = trace.loss.size() - tail; i < trace.loss.size(); ++i) sum += trace.loss[i];
    trace.final_loss = sum / static_cast<double>(tail);
  }
  return trace;
}

}  // namespace hafvf
