#pragma once

// Scalar special functions used by the log-partition functions and the
// forgetting-level updates: log-gamma, digamma, trigamma, their multivariate
// sums, and log-beta. All of them reject non-positive or non-finite input
// with a domain error instead of returning NaN.

#include <cmath>
#include <stdexcept>
#include <string>

#include "hafvf/errors.hpp"

namespace hafvf {

namespace detail {

inline void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(fn) + ": argument must be a positive finite real, got " +
                            std::to_string(x));
  }
}

}  // namespace detail

// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
  detail::require_positive(x, "log_gamma");
  return std::lgamma(x);
}

// psi_0(x) for x > 0. Recurrence shift to x >= 10, then the asymptotic
// Bernoulli-number expansion; accurate to ~1e-15 relative on (0, 1e6].
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;  // psi(x) = psi(x+1) - 1/x
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
  const double series = inv2 * (1.0 / 12.0 +
                        inv2 * (-1.0 / 120.0 +
                        inv2 * (1.0 / 252.0 +
                        inv2 * (-1.0 / 240.0 +
                        inv2 * (1.0 / 132.0 +
                        inv2 * (-691.0 / 32760.0 +
                        inv2 * (1.0 / 12.0)))))));
  return result + std::log(x) - 0.5 * inv - series;
}

// psi_1(x) for x > 0. Same shift/asymptotic scheme as digamma.
inline double trigamma(double x) {
  detail::require_positive(x, "trigamma");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);  // psi_1(x) = psi_1(x+1) + 1/x^2
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi_1(x) ~ 1/x + 1/(2x^2) + sum B_{2k}/x^{2k+1}
  const double series = inv * inv2 * (1.0 / 6.0 +
                        inv2 * (-1.0 / 30.0 +
                        inv2 * (1.0 / 42.0 +
                        inv2 * (-1.0 / 30.0 +
                        inv2 * (5.0 / 66.0 +
                        inv2 * (-691.0 / 2730.0 +
                        inv2 * (7.0 / 6.0)))))));
  return result + inv + 0.5 * inv2 + series;
}

// ln Gamma_d(x) = d(d-1)/4 ln pi + sum_{j=1..d} ln Gamma(x + (1-j)/2),
// defined for x > (d-1)/2.
inline double log_multivariate_gamma(double x, int d) {
  if (d < 1) {
    throw std::domain_error("log_multivariate_gamma: dimension must be >= 1");
  }
  if (!std::isfinite(x) || x <= 0.5 * (d - 1)) {
    throw std::domain_error("log_multivariate_gamma: requires x > (d-1)/2, got x=" +
                            std::to_string(x) + ", d=" + std::to_string(d));
  }
  constexpr double kLogPi = 1.1447298858494001741;
  double sum = 0.25 * d * (d - 1) * kLogPi;
  for (int j = 1; j <= d; ++j) {
    sum += std::lgamma(x + 0.5 * (1 - j));
  }
  return sum;
}

// sum_{j=1..d} psi_0(x + (1-j)/2); the derivative of log_multivariate_gamma.
inline double multivariate_digamma(double x, int d) {
  if (d < 1) {
    throw std::domain_error("multivariate_digamma: dimension must be >= 1");
  }
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    sum += digamma(x + 0.5 * (1 - j));
  }
  return sum;
}

// sum_{j=1..d} psi_1(x + (1-j)/2).
inline double multivariate_trigamma(double x, int d) {
  if (d < 1) {
    throw std::domain_error("multivariate_trigamma: dimension must be >= 1");
  }
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    sum += trigamma(x + 0.5 * (1 - j));
  }
  return sum;
}

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b).
inline double log_beta(double a, double b) {
  detail::require_positive(a, "log_beta");
  detail::require_positive(b, "log_beta");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace hafvf
