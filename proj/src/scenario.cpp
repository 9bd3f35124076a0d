#include "coolsim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "coolsim/errors.hpp"

namespace coolsim {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::FrozenSensors: return "frozen_sensors";
    case ScenarioKind::SensorDrift: return "sensor_drift";
    case ScenarioKind::FrozenControls: return "frozen_controls";
    case ScenarioKind::DynamicsNonstationarity: return "dynamics_nonstationarity";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  for (auto k : {ScenarioKind::FrozenSensors, ScenarioKind::SensorDrift, ScenarioKind::FrozenControls,
                 ScenarioKind::DynamicsNonstationarity})
    if (s == to_string(k)) return k;
  fail(Errc::Parse, "unknown scenario kind '" + s + "'");
}

void Scenario::validate() const {
  const bool params = kind == ScenarioKind::DynamicsNonstationarity;
  if (params) {
    require(!trajectories.empty() || !processes.empty(), Errc::InvalidArgument,
            "non-stationarity scenario without trajectories");
    for (const auto& [id, traj] : trajectories) {
      require(default_parameters().count(id) > 0, Errc::MissingId, "unknown parameter '" + id + "'");
      require(!traj.empty(), Errc::InvalidArgument, "empty trajectory for '" + id + "'");
      for (double v : traj)
        require(std::isfinite(v), Errc::InvalidArgument, "non-finite trajectory for '" + id + "'");
    }
    for (const auto& [id, p] : processes) {
      require(default_parameters().count(id) > 0, Errc::MissingId, "unknown parameter '" + id + "'");
      require(p.sigma >= 0.0 && p.correlation_steps > 0.0, Errc::InvalidArgument,
              "process for '" + id + "' needs sigma >= 0 and correlation > 0");
    }
    return;
  }
  require(!ids.empty(), Errc::InvalidArgument, std::string(to_string(kind)) + " scenario without ids");
  require(select >= 0 && select <= static_cast<int>(ids.size()), Errc::InvalidArgument,
          "scenario selects more ids than it lists");
  require(start_step >= 0 && duration >= 0, Errc::InvalidArgument, "negative freeze window");
  require(min_duration > 0 && max_duration >= min_duration, Errc::InvalidArgument,
          "freeze durations must be positive and ordered");
  require(amplitude >= 0.0 && correlation_steps > 0.0, Errc::InvalidArgument,
          "drift amplitude must be >= 0 and correlation time > 0");
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json j{{"kind", to_string(s.kind)}};
  if (s.kind == ScenarioKind::DynamicsNonstationarity) {
    if (!s.trajectories.empty()) j["trajectories"] = s.trajectories;
    if (!s.processes.empty()) {
      auto& p = j["processes"];
      for (const auto& [id, proc] : s.processes)
        p[id] = {{"mean", proc.mean},
                 {"sigma", proc.sigma},
                 {"correlation_steps", proc.correlation_steps},
                 {"stationary_start", proc.stationary_start}};
    }
    return j;
  }
  j["ids"] = s.ids;
  j["select"] = s.select;
  if (s.kind == ScenarioKind::SensorDrift) {
    j["amplitude"] = s.amplitude;
    j["correlation_steps"] = s.correlation_steps;
  } else {
    j["start_step"] = s.start_step;
    j["duration"] = s.duration;
    j["min_duration"] = s.min_duration;
    j["max_duration"] = s.max_duration;
  }
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    s.ids = j.value("ids", std::vector<std::string>{});
    s.select = j.value("select", 0);
    s.start_step = j.value("start_step", 0);
    s.duration = j.value("duration", 0);
    s.min_duration = j.value("min_duration", 1);
    s.max_duration = j.value("max_duration", std::max(3, s.min_duration));
    s.amplitude = j.value("amplitude", 0.0);
    s.correlation_steps = j.value("correlation_steps", 5.0);
    if (j.contains("trajectories"))
      s.trajectories = j.at("trajectories").get<std::map<std::string, std::vector<double>>>();
    if (j.contains("processes")) {
      for (const auto& [id, p] : j.at("processes").items()) {
        ParameterProcess proc;
        proc.mean = p.value("mean", 0.0);
        proc.sigma = p.value("sigma", 0.0);
        proc.correlation_steps = p.value("correlation_steps", 12.0);
        proc.stationary_start = p.value("stationary_start", true);
        s.processes[id] = proc;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------

ScenarioRun::ScenarioRun(const Scenario& scenario, int episode_length, std::uint64_t seed)
    : s_(scenario) {
  s_.validate();
  require(episode_length > 0, Errc::InvalidArgument, "episode length must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  selected_ = s_.ids;
  if (s_.select > 0 && s_.select < static_cast<int>(selected_.size())) {
    std::shuffle(selected_.begin(), selected_.end(), rng);
    selected_.resize(s_.select);
    std::sort(selected_.begin(), selected_.end());
  }

  if (s_.kind == ScenarioKind::FrozenSensors || s_.kind == ScenarioKind::FrozenControls) {
    start_ = s_.start_step > 0 ? s_.start_step
                               : std::uniform_int_distribution<int>(1, episode_length)(rng);
    const int dur = s_.duration > 0
                        ? s_.duration
                        : std::uniform_int_distribution<int>(s_.min_duration, s_.max_duration)(rng);
    end_ = start_ + dur - 1;
  }

  if (s_.kind == ScenarioKind::SensorDrift) {
    // One offset path shared by the selected ids, zero at reset.
    const double phi = std::exp(-1.0 / s_.correlation_steps);
    drift_.assign(episode_length + 1, 0.0);
    for (int k = 1; k <= episode_length; ++k)
      drift_[k] = phi * drift_[k - 1] + std::sqrt(1.0 - phi * phi) * s_.amplitude * normal(rng);
  }

  for (const auto& [id, p] : s_.processes) {
    const double phi = std::exp(-1.0 / p.correlation_steps);
    std::vector<double> v(episode_length + 1);
    double x = p.stationary_start ? p.sigma * normal(rng) : 0.0;
    for (int k = 0; k <= episode_length; ++k) {
      if (k > 0) x = phi * x + std::sqrt(1.0 - phi * phi) * p.sigma * normal(rng);
      v[k] = p.mean + x;
    }
    generated_[id] = std::move(v);
  }
}

double ScenarioRun::delta(const std::string& id, int step) const {
  double d = 0.0;
  if (const auto it = s_.trajectories.find(id); it != s_.trajectories.end()) {
    const auto& t = it->second;
    d += t[std::min<std::size_t>(step, t.size() - 1)];
  }
  if (const auto it = generated_.find(id); it != generated_.end()) {
    const auto& t = it->second;
    d += t[std::min<std::size_t>(step, t.size() - 1)];
  }
  return d;
}

void ScenarioRun::check_limits(const PlantConfig& baseline) const {
  for (const auto& [id, traj] : s_.trajectories) {
    const auto lim = baseline.limits.at(id);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double v = baseline.parameter(id) + traj[k];
      if (v < lim.lower || v > lim.upper)
        fail(Errc::LimitViolation, "trajectory for '" + id + "' reaches " + std::to_string(v) +
                                       " at step " + std::to_string(k) + ", outside [" +
                                       std::to_string(lim.lower) + ", " + std::to_string(lim.upper) + "]");
    }
  }
}

void ScenarioRun::apply_parameters(int step, const PlantConfig& baseline, PlantConfig& config) const {
  if (s_.kind != ScenarioKind::DynamicsNonstationarity) return;
  std::vector<std::string> moved;
  for (const auto& [id, t] : s_.trajectories) moved.push_back(id);
  for (const auto& [id, t] : generated_) moved.push_back(id);
  for (const auto& id : moved) {
    const auto lim = baseline.limits.at(id);
    double v = baseline.parameter(id) + delta(id, step);
    // Explicit trajectories were checked at reset, generated ones are clamped.
    v = std::clamp(v, lim.lower, lim.upper);
    config.set_parameter(id, v);
  }
}

void ScenarioRun::apply_controls(int step, std::map<std::string, double>& controls,
                                 const std::map<std::string, double>& previous) const {
  if (s_.kind != ScenarioKind::FrozenControls || !in_window(step)) return;
  for (const auto& id : selected_) {
    const auto it = previous.find(id);
    if (it == previous.end()) fail(Errc::MissingId, "frozen control '" + id + "' has no value");
    controls[id] = it->second;
  }
}

void ScenarioRun::apply_measurements(int step, std::map<std::string, double>& values,
                                     const std::map<std::string, double>& published) const {
  if (s_.kind == ScenarioKind::SensorDrift) {
    for (const auto& id : selected_) {
      const auto it = values.find(id);
      if (it == values.end()) fail(Errc::MissingId, "drifting sensor '" + id + "' not measured");
      it->second += drift_offset(step);
    }
  }
  if (s_.kind == ScenarioKind::FrozenSensors && in_window(step)) {
    for (const auto& id : selected_) {
      const auto it = published.find(id);
      if (it == published.end()) fail(Errc::MissingId, "frozen sensor '" + id + "' has no value");
      values[id] = it->second;
    }
  }
}

double ScenarioRun::drift_offset(int step) const {
  if (drift_.empty()) return 0.0;
  return drift_[std::min<std::size_t>(step, drift_.size() - 1)];
}

}  // namespace coolsim
