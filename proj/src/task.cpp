#include "coolsim/task.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coolsim/errors.hpp"
#include "coolsim/ids.hpp"

namespace coolsim {

void RewardParams::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, Errc::InvalidArgument, "reward alpha must be > 0");
  require(default_weight >= 0.0, Errc::InvalidArgument, "penalty weights must be >= 0");
  for (const auto& [id, w] : weights)
    require(std::isfinite(w) && w >= 0.0, Errc::InvalidArgument, "penalty weight for '" + id + "' must be >= 0");
}

double RewardParams::weight(const std::string& id) const {
  const auto it = weights.find(id);
  return it == weights.end() ? default_weight : it->second;
}

double base_reward(double total_power, double alpha) {
  require(total_power >= 0.0, Errc::InvalidArgument, "total power must be nonnegative");
  require(alpha > 0.0, Errc::InvalidArgument, "reward alpha must be > 0");
  return 1.0 / (total_power / alpha + 1.0);
}

double reward(double total_power, const RewardParams& params, const std::vector<Constraint>& constraints,
              const std::vector<ConstraintStatus>& statuses) {
  require(constraints.size() == statuses.size(), Errc::Arity, "one status per constraint expected");
  double r = base_reward(total_power, params.alpha);
  for (std::size_t i = 0; i < constraints.size(); ++i)
    if (is_soft(statuses[i])) r -= params.weight(constraints[i].id);
  return std::max(0.0, r);
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& task_ids() {
  static const std::vector<std::string> v{tasks::kEasyUnconstrained, tasks::kEasyConstrained,
                                          tasks::kEasyChillerTemp,   tasks::kMediumConstrainedSupply,
                                          tasks::kMediumCondenser,   tasks::kHardFull};
  return v;
}

Constraint chiller_subset_constraint() { return {ids::kNumChillers, 1.0, 1.0, 2.0, 2.0}; }

Constraint supply_temp_constraint() { return {ids::kSupplyTemp, 40.0, 44.0, 52.0, 56.0}; }

Scenario randomized_dry_bulb_scenario() {
  Scenario s;
  s.kind = ScenarioKind::DynamicsNonstationarity;
  // Centered on the 1-vs-2 chiller crossover so both counts can be optimal.
  s.processes["dry_bulb_offset_k"] = ParameterProcess{7.0, 6.0, 12.0, true};
  return s;
}

namespace {

TaskParts catalog_parts(const std::string& id) {
  TaskParts p;
  p.id = id;
  if (id == tasks::kEasyUnconstrained) {
    p.controls = {ids::kNumChillers};
    p.baseline = ControlMap{{ids::kNumChillers, 0}};
    p.optimal = p.baseline;
  } else if (id == tasks::kEasyConstrained) {
    p.controls = {ids::kNumChillers};
    p.constraints = {chiller_subset_constraint()};
    p.baseline = ControlMap{{ids::kNumChillers, 1}};
    p.optimal = p.baseline;
  } else if (id == tasks::kEasyChillerTemp) {
    p.controls = {ids::kChillerLeavingTemp};
    const double top = ids::action_spec(ids::kChillerLeavingTemp).maximum;
    p.baseline = ControlMap{{ids::kChillerLeavingTemp, top}};
    p.optimal = p.baseline;
  } else if (id == tasks::kMediumConstrainedSupply) {
    p.controls = {ids::kNumChillers};
    p.constraints = {chiller_subset_constraint(), supply_temp_constraint()};
    p.scenarios = {randomized_dry_bulb_scenario()};
    p.baseline = ControlMap{{ids::kNumChillers, 1}};
    p.optimal_note = "1 or 2 chillers depending on the dry bulb";
  } else if (id == tasks::kMediumCondenser) {
    p.controls = {ids::kNumChillers, ids::kTowerReturnTemp};
    p.constraints = {supply_temp_constraint()};
  } else if (id == tasks::kHardFull) {
    for (const auto& s : ids::action_specs()) p.controls.push_back(s.id);
    p.constraints = {supply_temp_constraint()};
  } else {
    fail(Errc::UnknownTask, "unknown task '" + id + "'");
  }
  return p;
}

bool is_parameter(const std::string& id) { return default_parameters().count(id) > 0; }

}  // namespace

TaskDef make_task(const std::string& id) { return compose_task(catalog_parts(id)); }

TaskDef compose_task(const TaskParts& parts) {
  require(!parts.id.empty(), Errc::InvalidArgument, "task needs an id");
  require(!parts.controls.empty(), Errc::InvalidArgument, "task '" + parts.id + "' controls nothing");
  require(parts.episode_length > 0, Errc::InvalidArgument, "episode length must be positive");
  parts.objective.validate();
  parts.noise.validate();

  std::set<std::string> seen;
  for (const auto& c : parts.controls) {
    require(ids::is_action(c), Errc::IncompatibleId, "'" + c + "' is not an action id");
    require(seen.insert(c).second, Errc::IncompatibleId, "control '" + c + "' listed twice");
  }
  // Keep the registry order so normalized action vectors are stable.
  std::vector<std::string> ordered;
  for (const auto& s : ids::action_specs())
    if (seen.count(s.id)) ordered.push_back(s.id);

  std::set<std::string> constrained;
  for (const auto& c : parts.constraints) {
    c.validate();
    require(ids::is_action(c.id) || ids::is_measurement(c.id), Errc::IncompatibleId,
            "constraint on unknown id '" + c.id + "'");
    require(constrained.insert(c.id).second, Errc::IncompatibleId, "two constraints on '" + c.id + "'");
  }
  for (const auto& s : parts.scenarios) {
    s.validate();
    for (const auto& id : s.ids) {
      if (s.kind == ScenarioKind::FrozenControls)
        require(ids::is_action(id), Errc::IncompatibleId, "frozen control '" + id + "' is not an action");
      else
        require(ids::is_measurement(id), Errc::IncompatibleId, "sensor '" + id + "' is not measured");
    }
  }
  for (const auto& t : parts.noise.initial_conditions)
    require(is_parameter(t.id), Errc::IncompatibleId, "initial-condition noise on unknown parameter '" + t.id + "'");
  for (const auto& t : parts.noise.controls)
    require(ids::is_action(t.id), Errc::IncompatibleId, "control noise on unknown action '" + t.id + "'");
  for (const auto& t : parts.noise.measurements)
    require(ids::is_measurement(t.id), Errc::IncompatibleId, "measurement noise on unknown id '" + t.id + "'");
  for (const auto* policy : {&parts.baseline, &parts.optimal}) {
    if (!*policy) continue;
    for (const auto& [id, v] : **policy)
      require(seen.count(id) > 0, Errc::IncompatibleId, "policy sets '" + id + "' outside the task controls");
  }

  TaskDef t;
  t.id = parts.id;
  t.controls = ordered;
  t.constraints = parts.constraints;
  t.scenarios = parts.scenarios;
  t.noise = parts.noise;
  t.reward = parts.objective;
  t.episode_length = parts.episode_length;
  t.baseline = parts.baseline;
  t.optimal = parts.optimal;
  t.optimal_note = parts.optimal_note;
  return t;
}

double observed_total_power(const std::map<std::string, double>& obs) {
  auto get = [&](const std::string& id) {
    const auto it = obs.find(id);
    if (it == obs.end()) fail(Errc::MissingId, "power observable '" + id + "' missing");
    return it->second;
  };
  double w = get(ids::kTowerFanPower) + get(ids::kCondenserPumpPower) + get(ids::kChilledPumpPower);
  for (int i = 0; i < ids::kMaxChillers; ++i) {
    const auto mask = obs.find(ids::mask_id(i));
    const bool real = mask == obs.end() ? obs.count(ids::chiller_id(i, ids::kCompressorPower)) > 0
                                        : mask->second > 0.5;
    if (real) w += get(ids::chiller_id(i, ids::kCompressorPower));
  }
  return w;
}

std::pair<double, std::map<std::string, double>> task_reward_and_observations(
    const TaskDef& task, const std::map<std::string, double>& obs,
    const std::vector<ConstraintStatus>& statuses) {
  const double w = std::max(0.0, observed_total_power(obs));
  std::map<std::string, double> extra;
  extra["task.total_power_kw"] = w;
  for (const auto& c : task.constraints) {
    const auto it = obs.find(c.id);
    extra["task." + c.id + ".soft_lower"] = c.soft_lower;
    extra["task." + c.id + ".soft_upper"] = c.soft_upper;
    // Remaining room before the nearest hard bound; negative once past it.
    if (it != obs.end())
      extra["task." + c.id + ".hard_margin"] = std::min(it->second - c.hard_lower, c.hard_upper - it->second);
  }
  return {reward(w, task.reward, task.constraints, statuses), extra};
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const TaskDef& t) {
  nlohmann::json j;
  j["id"] = t.id;
  j["controls"] = t.controls;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : t.constraints) j["constraints"].push_back(to_json(c));
  j["scenarios"] = nlohmann::json::array();
  for (const auto& s : t.scenarios) j["scenarios"].push_back(to_json(s));
  j["noise"] = to_json(t.noise);
  j["reward"] = {{"alpha_kw", t.reward.alpha}, {"default_weight", t.reward.default_weight}, {"weights", t.reward.weights}};
  j["episode_length"] = t.episode_length;
  if (t.baseline) j["baseline"] = *t.baseline;
  if (t.optimal) j["optimal"] = *t.optimal;
  if (!t.optimal_note.empty()) j["optimal_note"] = t.optimal_note;
  return j;
}

TaskDef task_from_json(const nlohmann::json& j) {
  if (j.is_string()) return make_task(j.get<std::string>());
  try {
    TaskParts p;
    if (j.contains("base")) p = catalog_parts(j.at("base").get<std::string>());
    p.id = j.value("id", p.id);
    if (j.contains("controls")) p.controls = j.at("controls").get<std::vector<std::string>>();
    if (j.contains("constraints")) {
      p.constraints.clear();
      for (const auto& c : j.at("constraints")) p.constraints.push_back(constraint_from_json(c));
    }
    if (j.contains("scenarios")) {
      p.scenarios.clear();
      for (const auto& s : j.at("scenarios")) p.scenarios.push_back(scenario_from_json(s));
    }
    if (j.contains("noise")) p.noise = noise_spec_from_json(j.at("noise"));
    if (j.contains("reward")) {
      const auto& r = j.at("reward");
      p.objective.alpha = r.value("alpha_kw", p.objective.alpha);
      p.objective.default_weight = r.value("default_weight", p.objective.default_weight);
      if (r.contains("weights")) p.objective.weights = r.at("weights").get<std::map<std::string, double>>();
    }
    p.episode_length = j.value("episode_length", p.episode_length);
    if (j.contains("baseline")) p.baseline = j.at("baseline").get<ControlMap>();
    if (j.contains("optimal")) p.optimal = j.at("optimal").get<ControlMap>();
    p.optimal_note = j.value("optimal_note", p.optimal_note);
    return compose_task(p);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("task: ") + e.what());
  }
}

}  // namespace coolsim
