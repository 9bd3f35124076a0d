#pragma once

// The task-suite environment: relays agent actions to the facility
// simulator and turns its measurements into observations, rewards and
// episode boundaries.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/facility.hpp"
#include "coolsim/ids.hpp"
#include "coolsim/noise.hpp"
#include "coolsim/scenario.hpp"
#include "coolsim/task.hpp"

namespace coolsim {

using Observation = std::map<std::string, double>;

enum class StepKind { First, Mid, Last };
const char* to_string(StepKind k);

struct TimeStepRecord {
  StepKind kind = StepKind::First;
  int step = 0;
  std::optional<double> reward;  // absent on the first record
  double discount = 1.0;         // 0 on the last record
  bool hard_violation = false;
  Observation observation;
};

struct EnvConfig {
  PlantConfig plant = default_plant_config();
  TaskDef task = make_task(tasks::kEasyUnconstrained);
  std::uint64_t seed = 0;
  int max_chillers = ids::kMaxChillers;  // padded observation frame

  void validate() const;
};

/// Document keys: plant (object or path), task (catalog id or object),
/// seed, episode_length, constraints, noise, scenarios, reward,
/// parameters (plant parameter overrides), max_chillers.
EnvConfig env_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
EnvConfig load_env_config(const std::string& path);
nlohmann::json to_json(const EnvConfig& c);

/// Affine map from [-1, 1] onto each id's action range, integer ids rounded
/// half away from zero. Components outside [-1, 1] are clipped.
ControlMap convert_action(const std::vector<double>& action, const std::vector<std::string>& ids);
/// Inverse of convert_action for one id.
double normalize_control(const std::string& id, double value);

/// Pads per-chiller groups to `max_chillers`, appends the mask bits.
Observation pad_measurements(const MeasurementMap& m, int chillers, int max_chillers);

class Environment {
 public:
  explicit Environment(EnvConfig config);

  TimeStepRecord reset();
  /// Normalized action, one component per task control in task order.
  TimeStepRecord step(const std::vector<double>& action);
  /// Controls in boundary units; ids outside the task controls are rejected.
  TimeStepRecord step_controls(const ControlMap& controls);

  const EnvConfig& config() const { return cfg_; }
  const TaskDef& task() const { return cfg_.task; }
  std::vector<ids::ActionSpec> action_spec() const;
  bool episode_over() const { return over_; }
  int step_index() const { return step_; }
  const FacilitySimulator& simulator() const { return sim_; }
  /// Controls handed to the simulator on the last step, after noise and
  /// freezes.
  const ControlMap& applied_controls() const { return applied_; }

 private:
  TimeStepRecord finish(const MeasurementMap& raw, bool first);

  EnvConfig cfg_;
  FacilitySimulator sim_;
  std::mt19937_64 rng_;
  PlantConfig baseline_;  // episode baseline after initial-condition noise
  NoiseChannel control_noise_;
  NoiseChannel measurement_noise_;
  std::vector<ScenarioRun> scenarios_;
  ControlMap agent_;    // agent's standing setpoints
  ControlMap applied_;
  MeasurementMap published_;
  int step_ = 0;
  bool started_ = false;
  bool over_ = false;
};

nlohmann::json to_json(const TimeStepRecord& r);
/// Trajectory document: metadata block plus one entry per record.
nlohmann::json trajectory_json(const EnvConfig& config, const std::vector<TimeStepRecord>& records);

}  // namespace coolsim
