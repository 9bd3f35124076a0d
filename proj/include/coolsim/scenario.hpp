#pragma once

// Scripted episode perturbations: frozen sensors, drifting sensors, frozen
// controls and trajectories of configuration parameters.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/plant_config.hpp"

namespace coolsim {

enum class ScenarioKind { FrozenSensors, SensorDrift, FrozenControls, DynamicsNonstationarity };

const char* to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

/// Generated parameter trajectory: an AR(1) process on the per-step delta.
struct ParameterProcess {
  double mean = 0.0;               // delta the process reverts to
  double sigma = 0.0;              // stationary std of the delta
  double correlation_steps = 12.0;
  bool stationary_start = true;    // first value drawn from the stationary law, else `mean`

  bool operator==(const ParameterProcess&) const = default;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::FrozenSensors;
  std::vector<std::string> ids;  // candidate measurement / control ids
  int select = 0;                // pick this many candidates per episode, 0 = all

  // Freeze window, in env steps (reset is step 0). start 0 draws a start in
  // [1, episode length]; duration 0 draws one in [min, max].
  int start_step = 0;
  int duration = 0;
  int min_duration = 1;
  int max_duration = 3;

  // Sensor drift.
  double amplitude = 0.0;
  double correlation_steps = 5.0;

  // Parameter deltas added to the episode's baseline value, indexed by step
  // (element 0 applies at reset, the last element holds afterwards).
  // Explicit trajectories must stay inside the parameter limits; generated
  // ones are clamped to them.
  std::map<std::string, std::vector<double>> trajectories;
  std::map<std::string, ParameterProcess> processes;

  void validate() const;
  bool operator==(const Scenario&) const = default;
};

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

/// One episode's realization of a scenario.
class ScenarioRun {
 public:
  ScenarioRun(const Scenario& scenario, int episode_length, std::uint64_t seed);

  /// Sets every moved parameter to baseline + delta(step) in `config`.
  /// Also used at reset with step 0.
  void apply_parameters(int step, const PlantConfig& baseline, PlantConfig& config) const;
  /// Throws LimitViolation when an explicit trajectory leaves the limits.
  void check_limits(const PlantConfig& baseline) const;

  /// Frozen controls keep `previous` while the window is open.
  void apply_controls(int step, std::map<std::string, double>& controls,
                      const std::map<std::string, double>& previous) const;
  /// Drift offsets and sensor freezes. `published` holds the values
  /// released at the previous step.
  void apply_measurements(int step, std::map<std::string, double>& values,
                          const std::map<std::string, double>& published) const;

  const std::vector<std::string>& selected() const { return selected_; }
  int window_start() const { return start_; }
  int window_end() const { return end_; }  // inclusive
  double drift_offset(int step) const;

 private:
  bool in_window(int step) const { return step >= start_ && step <= end_; }
  double delta(const std::string& id, int step) const;

  Scenario s_;
  std::vector<std::string> selected_;
  int start_ = 0, end_ = -1;
  std::vector<double> drift_;                              // per step
  std::map<std::string, std::vector<double>> generated_;  // per step
};

}  // namespace coolsim
