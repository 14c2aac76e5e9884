#pragma once

// Three-level adaptive filter: data level z with conjugate updates, a
// Beta-distributed forgetting level w over the carried posterior of z, and a
// Beta-distributed stability level b over the posterior of w whose own prior
// is mixed with a fixed weight gamma. One observation batch triggers a
// coordinate sweep (z, then w, then b) repeated until the joint parameters
// stop moving.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hafvf/beta_params.hpp"
#include "hafvf/errors.hpp"
#include "hafvf/families/bernoulli_beta.hpp"
#include "hafvf/family.hpp"
#include "hafvf/forgetting.hpp"
#include "hafvf/natural_params.hpp"

namespace hafvf {

template <ConjugateFamily F>
struct HierarchyConfig {
  HierarchyConfig()
    requires std::default_initializable<F>
  = default;
  HierarchyConfig(F fam, NaturalParams naive) : family(std::move(fam)), theta0(std::move(naive)) {}

  F family;
  NaturalParams theta0;
  BetaParams phi0{0.9, 0.1};
  BetaParams beta0{0.75, 0.25};
  double gamma = 0.999;

  // 1: w pinned to fixed_w (plain exponential forgetting; fixed_w = 1 is the
  //    stationary conjugate recursion). 2: learned w, b pinned to fixed_b.
  // 3: full hierarchy.
  int levels = 3;
  double fixed_w = 1.0;
  double fixed_b = 1.0;

  NcvmpControls controls;
  int max_sweeps = 50;

  // Optional cap on the effective samples each smoothing pass contributes.
  std::optional<double> fb_window;

  void validate() const {
    if (!family.valid(theta0)) throw config_error("hierarchy: naive prior is invalid");
    if (!phi0.valid()) throw config_error("hierarchy: w-level prior is invalid");
    if (!beta0.valid()) throw config_error("hierarchy: b-level prior is invalid");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw config_error("hierarchy: gamma must lie in [0,1]");
    if (levels < 1 || levels > 3) throw config_error("hierarchy: levels must be 1, 2 or 3");
    if (!(fixed_w >= 0.0 && fixed_w <= 1.0)) throw config_error("hierarchy: fixed_w in [0,1]");
    if (!(fixed_b >= 0.0 && fixed_b <= 1.0)) throw config_error("hierarchy: fixed_b in [0,1]");
    if (max_sweeps < 1) throw config_error("hierarchy: max_sweeps must be >= 1");
    if (fb_window && !(*fb_window > 0.0)) throw config_error("hierarchy: fb_window must be > 0");
    controls.validate();
  }
};

struct FilterState {
  NaturalParams theta;
  BetaParams phi;
  BetaParams beta;
  long step = 0;
};

struct StepDiagnostics {
  double e_w = 1.0;
  double var_w = 0.0;
  std::optional<double> e_b;
  double eta_eff = 0.0;
  double eta_asymptote = 0.0;
  double elbo = 0.0;
  double log_pred = 0.0;
  ForgettingIncrements increments_w;
  ForgettingIncrements increments_b;
  int sweeps = 0;
  int w_iterations = 0;
  int b_iterations = 0;
  bool reset_w = false;
  bool reset_b = false;
  bool converged = true;
};

template <ConjugateFamily F>
class AdaptiveFilter {
 public:
  explicit AdaptiveFilter(HierarchyConfig<F> config) : cfg_(std::move(config)) {
    cfg_.validate();
  }

  const HierarchyConfig<F>& config() const { return cfg_; }

  FilterState init() const { return FilterState{cfg_.theta0, cfg_.phi0, cfg_.beta0, 0}; }

  std::pair<FilterState, StepDiagnostics> step(const FilterState& state,
                                               const SufficientStats& stats) const {
    const F& f = cfg_.family;
    if (stats.t.size() != cfg_.theta0.xi.size()) {
      throw std::invalid_argument("step: statistic dimension mismatch");
    }
    if (!(stats.count >= 1.0)) {
      throw std::invalid_argument("step: batch count must be >= 1");
    }

    const NaturalParams& theta_prev = state.theta;
    const BetaParams& phi_prev = state.phi;
    const BetaParams& beta_prev = state.beta;

    // Fixed top-level mixing; constant across sweeps.
    const BetaParams beta_hat =
        cfg_.levels == 3 ? weighted_prior(beta_prev, cfg_.beta0, cfg_.gamma) : beta_prev;

    StepDiagnostics diag;

    // One-step-ahead predictive under the decayed prior, before any update.
    {
      const double b0 = initial_b_hat(beta_hat);
      const BetaParams phi_hat0 =
          cfg_.levels >= 2 ? weighted_prior(phi_prev, cfg_.phi0, b0) : cfg_.phi0;
      const double w0 = cfg_.levels == 1 ? cfg_.fixed_w : phi_hat0.mean();
      const NaturalParams pre = weighted_prior(theta_prev, cfg_.theta0, w0);
      diag.log_pred = log_predictive(f, pre, stats);
    }

    NaturalParams theta_cur = theta_prev;
    BetaParams phi_cur =
        cfg_.levels >= 2 ? weighted_prior(phi_prev, cfg_.phi0, initial_b_hat(beta_hat)) : phi_prev;
    BetaParams beta_cur = beta_hat;
    NcvmpResult w_res, b_res;

    double w_hat = cfg_.levels == 1 ? cfg_.fixed_w : phi_cur.mean();
    BetaParams phi_hat = cfg_.phi0;

    for (int sweep = 1; sweep <= cfg_.max_sweeps; ++sweep) {
      diag.sweeps = sweep;
      const NaturalParams theta_before = theta_cur;
      const BetaParams phi_before = phi_cur;
      const BetaParams beta_before = beta_cur;

      w_hat = cfg_.levels == 1 ? cfg_.fixed_w : phi_cur.mean();
      const NaturalParams vartheta_hat = weighted_prior(theta_prev, cfg_.theta0, w_hat);
      theta_cur = update_theta(vartheta_hat, stats);
      if (!f.valid(theta_cur)) {
        throw numerical_error("step: conjugate update produced invalid parameters");
      }

      if (cfg_.levels >= 2) {
        const MeanParams q_mean = f.mean_params(theta_cur);
        const double b_hat = cfg_.levels == 3 ? beta_cur.mean() : cfg_.fixed_b;
        phi_hat = weighted_prior(phi_prev, cfg_.phi0, b_hat);
        w_res = ncvmp_solve(f, theta_prev, cfg_.theta0, q_mean, phi_hat, phi_cur, cfg_.controls);
        phi_cur = w_res.phi;
        diag.w_iterations += w_res.iterations;
        diag.reset_w = diag.reset_w || w_res.reset_count > 0;

        if (cfg_.levels == 3) {
          const MeanParams qw_mean = beta_family_.mean_params(phi_cur.to_natural());
          b_res = ncvmp_solve(beta_family_, phi_prev.to_natural(), cfg_.phi0.to_natural(),
                              qw_mean, beta_hat, beta_cur, cfg_.controls);
          beta_cur = b_res.phi;
          diag.b_iterations += b_res.iterations;
          diag.reset_b = diag.reset_b || b_res.reset_count > 0;
        }
      }

      if (cfg_.levels == 1) break;

      const double change = std::max(
          {(theta_cur.full() - theta_before.full()).template lpNorm<Eigen::Infinity>(),
           std::abs(phi_cur.alpha - phi_before.alpha), std::abs(phi_cur.beta - phi_before.beta),
           std::abs(beta_cur.alpha - beta_before.alpha),
           std::abs(beta_cur.beta - beta_before.beta)});
      if (change < cfg_.controls.tol) break;
      if (sweep == cfg_.max_sweeps) diag.converged = false;
    }

    w_hat = cfg_.levels == 1 ? cfg_.fixed_w : phi_cur.mean();
    diag.e_w = w_hat;
    diag.var_w = cfg_.levels == 1 ? 0.0 : phi_cur.variance();
    if (cfg_.levels == 3) {
      diag.e_b = beta_cur.mean();
    } else if (cfg_.levels == 2) {
      diag.e_b = cfg_.fixed_b;
    }
    diag.increments_w = w_res.increments;
    diag.increments_b = b_res.increments;
    diag.eta_eff = theta_cur.eta;
    diag.eta_asymptote = memory_asymptote(cfg_.theta0.eta, w_hat);
    diag.elbo = approximate_elbo(theta_prev, phi_prev, theta_cur, phi_cur, beta_cur, beta_hat,
                                 phi_hat, stats, w_hat);

    FilterState next;
    next.theta = std::move(theta_cur);
    next.phi = cfg_.levels >= 2 ? phi_cur : phi_prev;
    next.beta = cfg_.levels == 3 ? beta_cur : beta_prev;
    next.step = state.step + 1;
    return {std::move(next), std::move(diag)};
  }

  // Decay-only advance: used when an observation has to be rejected.
  FilterState prior_only_step(const FilterState& state) const {
    FilterState next;
    const BetaParams beta_hat =
        cfg_.levels == 3 ? weighted_prior(state.beta, cfg_.beta0, cfg_.gamma) : state.beta;
    const double b_hat = initial_b_hat(beta_hat);
    const BetaParams phi_hat =
        cfg_.levels >= 2 ? weighted_prior(state.phi, cfg_.phi0, b_hat) : state.phi;
    const double w_hat = cfg_.levels == 1 ? cfg_.fixed_w : phi_hat.mean();
    next.theta = weighted_prior(state.theta, cfg_.theta0, w_hat);
    next.phi = phi_hat;
    next.beta = beta_hat;
    next.step = state.step + 1;
    return next;
  }

  std::vector<std::pair<FilterState, StepDiagnostics>> run(
      const std::vector<SufficientStats>& stream) const {
    std::vector<std::pair<FilterState, StepDiagnostics>> out;
    out.reserve(stream.size());
    FilterState state = init();
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const auto at = [i](const char* what) {
        return "observation " + std::to_string(i) + ": " + what;
      };
      try {
        auto [next, diag] = step(state, stream[i]);
        state = next;
        out.emplace_back(std::move(next), std::move(diag));
      } catch (const numerical_error& e) {
        throw numerical_error(at(e.what()));
      } catch (const std::domain_error& e) {
        throw std::domain_error(at(e.what()));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(at(e.what()));
      }
    }
    return out;
  }

  struct FbResult {
    std::vector<NaturalParams> combined;
    std::vector<std::pair<FilterState, StepDiagnostics>> forward;
    std::vector<std::pair<FilterState, StepDiagnostics>> backward;  // backward[i] matches trial i
    int clamp_count = 0;
  };

  // Offline smoother: combine the forward posterior and the posterior of a
  // time-reversed pass, removing the doubly counted observation and prior.
  FbResult forward_backward(const std::vector<SufficientStats>& stream) const {
    FbResult res;
    res.forward = run(stream);
    std::vector<SufficientStats> reversed(stream.rbegin(), stream.rend());
    auto bwd = run(reversed);
    res.backward.resize(bwd.size());
    const std::size_t n = stream.size();
    for (std::size_t i = 0; i < n; ++i) res.backward[i] = std::move(bwd[n - 1 - i]);
    res.combined.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const NaturalParams fwd_part = windowed(res.forward[i].first.theta);
      const NaturalParams bwd_part = windowed(res.backward[i].first.theta);
      NaturalParams comb;
      comb.xi = fwd_part.xi + bwd_part.xi - stream[i].t - cfg_.theta0.xi;
      comb.eta = fwd_part.eta + bwd_part.eta - stream[i].count - cfg_.theta0.eta;
      if (!cfg_.family.valid(comb)) {
        comb = cfg_.theta0;
        ++res.clamp_count;
      }
      res.combined.push_back(std::move(comb));
    }
    return res;
  }

  // Current effective observation count and its fixed-point limit under the
  // current expected forgetting factor.
  std::pair<double, double> effective_memory(const FilterState& state) const {
    const double e_w = cfg_.levels == 1 ? cfg_.fixed_w : state.phi.mean();
    return {state.theta.eta, memory_asymptote(cfg_.theta0.eta, e_w)};
  }

 private:
  static double memory_asymptote(double eta0, double e_w) {
    if (e_w >= 1.0) return std::numeric_limits<double>::infinity();
    return eta0 + 1.0 / (1.0 - e_w);
  }

  double initial_b_hat(const BetaParams& beta_hat) const {
    if (cfg_.levels == 3) return beta_hat.mean();
    if (cfg_.levels == 2) return cfg_.fixed_b;
    return 1.0;
  }

  NaturalParams windowed(const NaturalParams& pass) const {
    if (!cfg_.fb_window) return pass;
    const double excess = pass.eta - cfg_.theta0.eta;
    if (excess <= *cfg_.fb_window) return pass;
    const double shrink = *cfg_.fb_window / excess;
    NaturalParams out;
    out.xi = cfg_.theta0.xi + shrink * (pass.xi - cfg_.theta0.xi);
    out.eta = cfg_.theta0.eta + shrink * excess;
    return out;
  }

  double approximate_elbo(const NaturalParams& theta_prev, const BetaParams& phi_prev,
                          const NaturalParams& theta_cur, const BetaParams& phi_cur,
                          const BetaParams& beta_cur, const BetaParams& beta_hat,
                          const BetaParams& phi_hat, const SufficientStats& stats,
                          double w_hat) const {
    const F& f = cfg_.family;
    const MeanParams m_q = f.mean_params(theta_cur);
    double elbo = stats.t.dot(m_q.m.head(stats.t.size())) + stats.count * m_q.m[m_q.m.size() - 1];

    const NaturalParams vartheta_hat = weighted_prior(theta_prev, cfg_.theta0, w_hat);
    double taylor_z = 0.0;
    if (cfg_.levels >= 2) {
      const SegmentDerivs derivs = b_directional_derivs(f, theta_prev, cfg_.theta0, w_hat);
      taylor_z = 0.5 * phi_cur.variance() * std::max(derivs.d2, 0.0);
    }
    elbo += m_q.m.dot(vartheta_hat.full() - theta_cur.full()) + f.log_partition(theta_cur) -
            f.log_partition(vartheta_hat) - taylor_z;

    if (cfg_.levels >= 2) {
      const auto [ml_w, ml_1mw] = phi_cur.mean_log_stats();
      double taylor_w = 0.0;
      if (cfg_.levels == 3) {
        const double b_hat = beta_cur.mean();
        const NaturalParams mixed = weighted_prior(phi_prev.to_natural(), cfg_.phi0.to_natural(), b_hat);
        NaturalParams dphi;
        dphi.xi = phi_prev.to_natural().xi - cfg_.phi0.to_natural().xi;
        dphi.eta = phi_prev.to_natural().eta - cfg_.phi0.to_natural().eta;
        const double d2_w = beta_family_.segment_curvature(mixed, dphi);
        taylor_w = 0.5 * beta_cur.variance() * std::max(d2_w, 0.0);
      }
      elbo += (phi_hat.alpha - phi_cur.alpha) * ml_w + (phi_hat.beta - phi_cur.beta) * ml_1mw +
              log_beta(phi_cur.alpha, phi_cur.beta) - log_beta(phi_hat.alpha, phi_hat.beta) -
              taylor_w;
    }
    if (cfg_.levels == 3) {
      const auto [ml_b, ml_1mb] = beta_cur.mean_log_stats();
      elbo += (beta_hat.alpha - beta_cur.alpha) * ml_b + (beta_hat.beta - beta_cur.beta) * ml_1mb +
              log_beta(beta_cur.alpha, beta_cur.beta) - log_beta(beta_hat.alpha, beta_hat.beta);
    }
    return elbo;
  }

  HierarchyConfig<F> cfg_;
  BetaFamily beta_family_;
};

}  // namespace hafvf
