#pragma once

#include <stdexcept>
#include <string>

namespace hafvf {

// Malformed input data (streams, rows). Maps to CLI exit code 1.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (priors, flags, file keys). Maps to CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: domain violations, singular systems, non-finite
// intermediate values. Maps to CLI exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hafvf
