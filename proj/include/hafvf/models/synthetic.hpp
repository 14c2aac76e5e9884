#pragma once

// Seeded generators for the benchmark scenarios: a switching binary stream,
// a drifting bivariate Gaussian, and piecewise-stationary sinusoid mixtures
// with optional impulse artifacts. Every stream carries its ground-truth
// change trials (1-based index of the last trial of each regime) and, where
// applicable, artifact trials.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "hafvf/errors.hpp"
#include "hafvf/rng.hpp"

namespace hafvf {

enum class Scenario { BinarySwitch, Gaussian2dWalk, SinusoidMix, ImpulseArtifacts };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::BinarySwitch: return "binary-switch";
    case Scenario::Gaussian2dWalk: return "gaussian-2d-walk";
    case Scenario::SinusoidMix: return "sinusoid-mix";
    case Scenario::ImpulseArtifacts: return "impulse-artifacts";
  }
  return "?";
}

inline Scenario scenario_from_name(const std::string& name) {
  if (name == "binary-switch") return Scenario::BinarySwitch;
  if (name == "gaussian-2d-walk") return Scenario::Gaussian2dWalk;
  if (name == "sinusoid-mix") return Scenario::SinusoidMix;
  if (name == "impulse-artifacts") return Scenario::ImpulseArtifacts;
  throw config_error("unknown scenario '" + name +
                     "' (valid: binary-switch, gaussian-2d-walk, sinusoid-mix, "
                     "impulse-artifacts)");
}

struct SyntheticSpec {
  Scenario scenario = Scenario::BinarySwitch;
  std::uint64_t seed = 1;

  // binary-switch
  int n = 200;
  int period = 40;
  double p_high = 0.8;
  double p_low = 0.2;

  // gaussian-2d-walk
  int segment_length = 200;
  double walk_sigma = 0.05;

  // sinusoid-mix / impulse-artifacts (total length n, boundary at n/2)
  int wave_count = 5;
  double noise_var = 0.1;
  double impulse_magnitude = 2.0;
  std::vector<long> impulse_trials{100, 300};

  void validate() const {
    if (n < 1) throw config_error("generator: n must be >= 1");
    if (scenario == Scenario::BinarySwitch) {
      if (period < 1) throw config_error("generator: period must be >= 1");
      if (!(p_high >= 0.0 && p_high <= 1.0 && p_low >= 0.0 && p_low <= 1.0)) {
        throw config_error("generator: probabilities must lie in [0,1]");
      }
    }
    if (scenario == Scenario::Gaussian2dWalk && segment_length < 1) {
      throw config_error("generator: segment_length must be >= 1");
    }
    if (scenario == Scenario::SinusoidMix || scenario == Scenario::ImpulseArtifacts) {
      if (wave_count < 1) throw config_error("generator: wave_count must be >= 1");
      if (!(noise_var >= 0.0)) throw config_error("generator: noise_var must be >= 0");
      for (long t : impulse_trials) {
        if (t < 1 || t > n) throw config_error("generator: impulse trial out of range");
      }
    }
  }
};

struct GeneratedStream {
  Scenario scenario;
  std::vector<double> values;            // binary / signal scenarios
  std::vector<Eigen::VectorXd> vectors;  // gaussian-2d-walk
  std::vector<long> change_trials;
  std::vector<long> artifact_trials;

  std::size_t size() const { return vectors.empty() ? values.size() : vectors.size(); }
};

inline GeneratedStream generate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  GeneratedStream out;
  out.scenario = spec.scenario;

  switch (spec.scenario) {
    case Scenario::BinarySwitch: {
      out.values.reserve(spec.n);
      for (int t = 0; t < spec.n; ++t) {
        const int regime = t / spec.period;
        const double p = (regime % 2 == 0) ? spec.p_high : spec.p_low;
        out.values.push_back(rng.bernoulli(p) ? 1.0 : 0.0);
      }
      for (long c = spec.period; c < spec.n; c += spec.period) out.change_trials.push_back(c);
      break;
    }
    case Scenario::Gaussian2dWalk: {
      const Eigen::Vector2d mean1(-2.0, 2.0), mean2(2.0, -2.0);
      Eigen::Vector2d walk = Eigen::Vector2d::Zero();
      out.vectors.reserve(2 * spec.segment_length);
      for (int t = 0; t < 2 * spec.segment_length; ++t) {
        walk[0] += rng.normal(0.0, spec.walk_sigma);
        walk[1] += rng.normal(0.0, spec.walk_sigma);
        const Eigen::Vector2d base = (t < spec.segment_length) ? mean1 : mean2;
        Eigen::VectorXd x(2);
        x[0] = base[0] + walk[0] + rng.normal();
        x[1] = base[1] + walk[1] + rng.normal();
        out.vectors.push_back(std::move(x));
      }
      out.change_trials.push_back(spec.segment_length);
      break;
    }
    case Scenario::SinusoidMix:
    case Scenario::ImpulseArtifacts: {
      const int half = spec.n / 2;
      struct Wave {
        double amp, freq, phase;
      };
      std::vector<Wave> low(spec.wave_count), high(spec.wave_count);
      for (auto& w : low) {
        w.amp = rng.uniform(0.3, 0.7);
        w.freq = rng.uniform(0.02, 0.06);
        w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      for (auto& w : high) {
        w.amp = rng.uniform(0.3, 0.7);
        w.freq = rng.uniform(0.12, 0.30);
        w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      const double sd = std::sqrt(spec.noise_var);
      out.values.reserve(spec.n);
      for (int t = 0; t < spec.n; ++t) {
        const auto& waves = (t < half) ? low : high;
        double v = 0.0;
        for (const auto& w : waves) {
          v += w.amp * std::sin(2.0 * std::numbers::pi * w.freq * t + w.phase);
        }
        out.values.push_back(v + rng.normal(0.0, sd));
      }
      out.change_trials.push_back(half);
      if (spec.scenario == Scenario::ImpulseArtifacts) {
        for (long trial : spec.impulse_trials) {
          out.values[trial - 1] += spec.impulse_magnitude;
          out.artifact_trials.push_back(trial);
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace hafvf
