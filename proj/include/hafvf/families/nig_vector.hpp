#pragma once

// A bundle of independent scalar Normal-Inverse-Gamma models that share one
// observation count and one precision-scale trajectory:
//   xi = [s1 (D), s2 (D), n2], eta = kappa.
// Used by the gradient optimizer, where every coordinate of a parameter
// group is tracked by its own NIG posterior but the whole group shares a
// single forgetting hierarchy; the shared slots make the group's evidence
// for a change accumulate across coordinates.

#include <Eigen/Dense>
#include <cmath>
#include <string_view>

#include "hafvf/natural_params.hpp"
#include "hafvf/special_functions.hpp"

namespace hafvf {

class NigVector {
 public:
  using Observation = Eigen::VectorXd;

  explicit NigVector(int dim) : d_(dim) {
    if (dim < 1) throw config_error("nig-vector: dimension must be >= 1");
  }

  int dim() const { return d_; }
  Eigen::Index xi_dim() const { return 2 * d_ + 1; }
  std::string_view name() const { return "nig-vector"; }

  NaturalParams from_moments(double mu0, double kappa, double shape, double rate) const {
    Eigen::VectorXd xi(xi_dim());
    xi.head(d_).setConstant(kappa * mu0);
    xi.segment(d_, d_).setConstant(2.0 * rate + kappa * mu0 * mu0);
    xi[xi.size() - 1] = 2.0 * shape + 3.0;
    return NaturalParams(xi, kappa);
  }

  double n2(const NaturalParams& th) const { return th.xi[th.xi.size() - 1]; }
  double shape(const NaturalParams& th) const { return 0.5 * (n2(th) - 3.0); }
  Eigen::VectorXd means(const NaturalParams& th) const { return th.xi.head(d_) / th.eta; }
  Eigen::VectorXd rates(const NaturalParams& th) const {
    return 0.5 *
           (th.xi.segment(d_, d_) - th.xi.head(d_).cwiseProduct(th.xi.head(d_)) / th.eta).array();
  }

  bool valid(const NaturalParams& th) const {
    if (th.xi.size() != xi_dim() || !th.finite()) return false;
    if (th.eta <= 0.0 || shape(th) <= 0.0) return false;
    return (rates(th).array() > 0.0).all();
  }

  double log_partition(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double a = shape(th);
    const Eigen::VectorXd b = rates(th);
    if (!(b.array() > 0.0).all()) throw std::domain_error("nig-vector: nonpositive rate");
    return d_ * (-0.5 * (n2(th) - 1.0) * kLog2Pi - 0.5 * std::log(th.eta) + log_gamma(a)) -
           a * b.array().log().sum();
  }

  MeanParams mean_params(const NaturalParams& th) const {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double a = shape(th);
    const Eigen::VectorXd b = rates(th);
    const Eigen::VectorXd mu = means(th);
    const Eigen::ArrayXd prec = a / b.array();
    Eigen::VectorXd m(xi_dim() + 1);
    m.head(d_) = (prec * mu.array()).matrix();
    m.segment(d_, d_) = (-0.5 * prec).matrix();
    m[2 * d_] = -0.5 * d_ * kLog2Pi + 0.5 * d_ * digamma(a) - 0.5 * b.array().log().sum();
    m[xi_dim()] =
        -0.5 * d_ / th.eta - 0.5 * (prec * mu.array().square()).sum();
    return {m};
  }

  SufficientStats suff_stats(const Observation& x) const {
    if (x.size() != d_) throw std::domain_error("nig-vector: observation dimension mismatch");
    if (!x.allFinite()) throw std::domain_error("nig-vector: non-finite observation");
    Eigen::VectorXd t(xi_dim());
    t.head(d_) = x;
    t.segment(d_, d_) = x.cwiseProduct(x);
    t[t.size() - 1] = 1.0;
    return {t, 1.0};
  }

 private:
  int d_;
};

}  // namespace hafvf
