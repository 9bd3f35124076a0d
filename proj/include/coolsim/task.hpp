#pragma once

// Reward, task definitions and the catalog of the task suite.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/constraints.hpp"
#include "coolsim/facility.hpp"
#include "coolsim/noise.hpp"
#include "coolsim/scenario.hpp"

namespace coolsim {

struct RewardParams {
  double alpha = 1000.0;  // kW
  double default_weight = 0.1;
  std::map<std::string, double> weights;  // per constraint id, overrides the default

  void validate() const;
  double weight(const std::string& id) const;
  bool operator==(const RewardParams&) const = default;
};

/// 1 / (W / alpha + 1)
double base_reward(double total_power, double alpha);

/// Base reward minus the weighted soft-violation indicators, floored at 0.
double reward(double total_power, const RewardParams& params, const std::vector<Constraint>& constraints,
              const std::vector<ConstraintStatus>& statuses);

struct TaskDef {
  std::string id;
  std::vector<std::string> controls;  // action ids the agent drives, in action order
  std::vector<Constraint> constraints;
  std::vector<Scenario> scenarios;
  NoiseSpec noise;
  RewardParams reward;
  int episode_length = 10;
  std::optional<ControlMap> baseline;  // constant policies on the task controls
  std::optional<ControlMap> optimal;
  std::string optimal_note;            // when the optimum is conditional

  bool operator==(const TaskDef&) const = default;
};

namespace tasks {
inline constexpr const char* kEasyUnconstrained = "easy/unconstrained-chillers";
inline constexpr const char* kEasyConstrained = "easy/constrained-chillers";
inline constexpr const char* kEasyChillerTemp = "easy/chiller-temperature";
inline constexpr const char* kMediumConstrainedSupply = "medium/constrained-chillers-with-supply-temp";
inline constexpr const char* kMediumCondenser = "medium/chillers-and-condenser-temp";
inline constexpr const char* kHardFull = "hard/full-control";
}  // namespace tasks

const std::vector<std::string>& task_ids();
TaskDef make_task(const std::string& id);

/// Chiller subset allowed by the constrained tasks.
Constraint chiller_subset_constraint();
/// Chilled-water supply band used by the medium and hard tasks, degF.
Constraint supply_temp_constraint();
/// Randomized dry bulb of the medium task.
Scenario randomized_dry_bulb_scenario();

struct TaskParts {
  std::string id;
  RewardParams objective;
  std::vector<std::string> controls;
  std::vector<Scenario> scenarios;
  NoiseSpec noise;
  std::vector<Constraint> constraints;
  int episode_length = 10;
  std::optional<ControlMap> baseline;
  std::optional<ControlMap> optimal;
  std::string optimal_note;
};

/// Validates the parts against the id registry and assembles a task.
TaskDef compose_task(const TaskParts& parts);

/// W is the sum of the power observables of the real (mask = 1) chillers
/// plus fans and both pump banks. Task observations carry W and the
/// distance to each constraint's band.
std::pair<double, std::map<std::string, double>> task_reward_and_observations(
    const TaskDef& task, const std::map<std::string, double>& observation,
    const std::vector<ConstraintStatus>& statuses);

double observed_total_power(const std::map<std::string, double>& observation);

nlohmann::json to_json(const TaskDef& t);
/// A string names a catalog task; an object is composed from its fields,
/// starting from the catalog task named by "base" when present.
TaskDef task_from_json(const nlohmann::json& j);

}  // namespace coolsim
