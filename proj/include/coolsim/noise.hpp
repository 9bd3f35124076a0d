#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coolsim {

enum class NoiseKind { None, Gaussian, Frozen, Drift };

const char* to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

struct NoiseTerm {
  std::string id;
  NoiseKind kind = NoiseKind::Gaussian;
  double std = 0.0;  // gaussian, in the id's unit

  // frozen: each step a freeze starts with this probability and holds the
  // last value for a uniform number of steps in [min, max].
  double freeze_probability = 0.0;
  int freeze_min_steps = 1;
  int freeze_max_steps = 1;

  // drift: AR(1) offset with this stationary std and correlation time.
  double drift_amplitude = 0.0;
  double drift_correlation_steps = 5.0;

  void validate() const;
  bool operator==(const NoiseTerm&) const = default;
};

/// Independent noise lists for initial conditions (configuration
/// parameters), controls and measurements.
struct NoiseSpec {
  std::vector<NoiseTerm> initial_conditions;
  std::vector<NoiseTerm> controls;
  std::vector<NoiseTerm> measurements;

  /// Initial conditions take gaussian (or none) terms only.
  void validate() const;
  bool empty() const;
  bool operator==(const NoiseSpec&) const = default;
};

nlohmann::json to_json(const NoiseSpec& n);
NoiseSpec noise_spec_from_json(const nlohmann::json& j);

/// Stateful realization of one noise list over an episode.
class NoiseChannel {
 public:
  NoiseChannel() = default;
  NoiseChannel(std::vector<NoiseTerm> terms, std::uint64_t seed);

  /// Perturbs the ids named by the terms; a named id missing from `values`
  /// is a MissingId error.
  void apply(std::map<std::string, double>& values);

 private:
  struct TermState {
    int frozen_left = 0;
    double held = 0.0;
    double offset = 0.0;
    bool primed = false;
  };
  std::vector<NoiseTerm> terms_;
  std::vector<TermState> states_;
  std::mt19937_64 rng_;
};

}  // namespace coolsim
