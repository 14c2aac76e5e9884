#pragma once

// Bernoulli observations with a Beta conjugate posterior over the success
// probability. Parameters are stored as the pseudo-count pair xi = [a, b]
// with eta = a + b tracking the effective observation count; the pairing
// statistics are [log z, log(1-z)], so the same class serves as the Beta
// family of the forgetting levels.

#include <Eigen/Dense>
#include <cmath>
#include <string_view>

#include "hafvf/beta_params.hpp"
#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

class BernoulliBeta {
 public:
  using Observation = double;  // 0 or 1

  Eigen::Index xi_dim() const { return 2; }
  std::string_view name() const { return "bernoulli-beta"; }

  static NaturalParams from_counts(double a, double b) {
    Eigen::VectorXd xi(2);
    xi << a, b;
    return NaturalParams(xi, a + b);
  }

  static double a(const NaturalParams& th) { return th.xi[0]; }
  static double b(const NaturalParams& th) { return th.xi[1]; }

  bool valid(const NaturalParams& th) const {
    return th.xi.size() == 2 && th.finite() && th.xi[0] > 0.0 && th.xi[1] > 0.0 && th.eta >= 0.0;
  }

  double log_partition(const NaturalParams& th) const {
    return log_beta(th.xi[0], th.xi[1]);
  }

  // (E[log z], E[log(1-z)], 0); the count slot is redundant for this family.
  MeanParams mean_params(const NaturalParams& th) const {
    const double ds = digamma(th.xi[0] + th.xi[1]);
    Eigen::VectorXd m(3);
    m << digamma(th.xi[0]) - ds, digamma(th.xi[1]) - ds, 0.0;
    return {m};
  }

  SufficientStats suff_stats(Observation x) const {
    if (!(x == 0.0 || x == 1.0)) {
      throw std::domain_error("bernoulli-beta: observation must be 0 or 1, got " +
                              std::to_string(x));
    }
    Eigen::VectorXd t(2);
    t << x, 1.0 - x;
    return {t, 1.0};
  }

  // The exact pairing coefficients are the pseudo-counts minus one.
  Eigen::VectorXd natural_offset() const {
    Eigen::VectorXd o(3);
    o << 1.0, 1.0, 0.0;
    return o;
  }

  // d^2/dw^2 log B(a(w), b(w)) along a mixing segment, in closed form.
  double segment_curvature(const NaturalParams& at, const NaturalParams& delta) const {
    const double da = delta.xi[0], db = delta.xi[1];
    return trigamma(at.xi[0]) * da * da + trigamma(at.xi[1]) * db * db -
           trigamma(at.xi[0] + at.xi[1]) * (da + db) * (da + db);
  }

  double posterior_mean(const NaturalParams& th) const { return th.xi[0] / (th.xi[0] + th.xi[1]); }
};

// The forgetting levels are Beta distributed; they reuse the same
// log-partition, mean-statistic, and curvature code.
using BetaFamily = BernoulliBeta;

}  // namespace hafvf
