#include "coolsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "coolsim/errors.hpp"
#include "coolsim/version.hpp"

namespace coolsim {

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::First: return "first";
    case StepKind::Mid: return "mid";
    case StepKind::Last: return "last";
  }
  return "?";
}

void EnvConfig::validate() const {
  plant.validate();
  require(max_chillers >= plant.chillers && max_chillers <= ids::kMaxChillers, Errc::InvalidArgument,
          "observation frame must hold the configured chillers");
  for (const auto& t : task.noise.initial_conditions)
    require(plant.parameters.count(t.id) > 0, Errc::MissingId, "no plant parameter '" + t.id + "'");
}

EnvConfig env_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  EnvConfig c;
  try {
    if (j.contains("plant")) {
      const auto& p = j.at("plant");
      if (p.is_string()) {
        std::filesystem::path path(p.get<std::string>());
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        c.plant = load_plant_config(path.string());
      } else {
        c.plant = plant_config_from_json(p, base_dir);
      }
    }
    if (j.contains("parameters"))
      for (const auto& [id, v] : j.at("parameters").items()) c.plant.set_parameter(id, v.get<double>());

    nlohmann::json task = j.value("task", nlohmann::json(tasks::kEasyUnconstrained));
    if (task.is_string()) task = nlohmann::json{{"base", task.get<std::string>()}, {"id", task.get<std::string>()}};
    for (const char* key : {"episode_length", "constraints", "noise", "scenarios", "reward"})
      if (j.contains(key)) task[key] = j.at(key);
    c.task = task_from_json(task);
    c.seed = j.value("seed", std::uint64_t{0});
    c.max_chillers = j.value("max_chillers", ids::kMaxChillers);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("environment config: ") + e.what());
  }
  c.validate();
  return c;
}

EnvConfig load_env_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::Parse, "cannot open environment config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, path + ": " + e.what());
  }
  return env_config_from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json to_json(const EnvConfig& c) {
  return {{"plant", to_json(c.plant)},
          {"task", to_json(c.task)},
          {"seed", c.seed},
          {"max_chillers", c.max_chillers}};
}

ControlMap convert_action(const std::vector<double>& action, const std::vector<std::string>& ids) {
  require(action.size() == ids.size(), Errc::Arity,
          "action has " + std::to_string(action.size()) + " components, expected " + std::to_string(ids.size()));
  ControlMap out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    require(std::isfinite(action[i]), Errc::InvalidArgument, "non-finite action component");
    const auto& s = ids::action_spec(ids[i]);
    const double a = std::clamp(action[i], -1.0, 1.0);
    double v = s.minimum + 0.5 * (a + 1.0) * (s.maximum - s.minimum);
    if (s.integer) v = quantize(v);
    out[ids[i]] = v;
  }
  return out;
}

double normalize_control(const std::string& id, double value) {
  const auto& s = ids::action_spec(id);
  return 2.0 * (value - s.minimum) / (s.maximum - s.minimum) - 1.0;
}

Observation pad_measurements(const MeasurementMap& m, int chillers, int max_chillers) {
  require(chillers <= max_chillers, Errc::InvalidArgument, "plant larger than the observation frame");
  Observation o;
  for (const auto& s : ids::observation_specs()) {
    if (!s.per_chiller) {
      const auto it = m.find(s.id);
      if (it == m.end()) fail(Errc::MissingId, "measurement '" + s.id + "' missing");
      o[s.id] = it->second;
      continue;
    }
    for (int i = 0; i < max_chillers; ++i) {
      const std::string id = ids::chiller_id(i, s.id);
      if (i < chillers) {
        const auto it = m.find(id);
        if (it == m.end()) fail(Errc::MissingId, "measurement '" + id + "' missing");
        o[id] = it->second;
      } else {
        o[id] = 0.0;
      }
    }
  }
  for (int i = 0; i < max_chillers; ++i) o[ids::mask_id(i)] = i < chillers ? 1.0 : 0.0;
  return o;
}

// ---------------------------------------------------------------------------

Environment::Environment(EnvConfig config) : cfg_(std::move(config)), rng_(cfg_.seed) {
  cfg_.validate();
}

std::vector<ids::ActionSpec> Environment::action_spec() const {
  std::vector<ids::ActionSpec> out;
  for (const auto& id : cfg_.task.controls) {
    auto s = ids::action_spec(id);
    if (id == ids::kNumChillers) s.maximum = std::min<double>(s.maximum, cfg_.plant.chillers);
    out.push_back(s);
  }
  return out;
}

TimeStepRecord Environment::reset() {
  // Fixed number of draws per reset keeps the streams independent of which
  // perturbations are configured.
  const std::uint64_t ic_seed = rng_(), control_seed = rng_(), measurement_seed = rng_(),
                      scenario_seed = rng_();

  // Initial-condition noise on configuration parameters, kept in limits.
  baseline_ = cfg_.plant;
  {
    std::map<std::string, double> params = baseline_.parameters;
    NoiseChannel ic(cfg_.task.noise.initial_conditions, ic_seed);
    ic.apply(params);
    for (const auto& t : cfg_.task.noise.initial_conditions) {
      const auto lim = baseline_.limits.at(t.id);
      baseline_.set_parameter(t.id, std::clamp(params.at(t.id), lim.lower, lim.upper));
    }
  }
  control_noise_ = NoiseChannel(cfg_.task.noise.controls, control_seed);
  measurement_noise_ = NoiseChannel(cfg_.task.noise.measurements, measurement_seed);

  scenarios_.clear();
  std::seed_seq seq{scenario_seed};
  std::vector<std::uint64_t> seeds(cfg_.task.scenarios.size());
  {
    std::vector<std::uint32_t> words(2 * seeds.size());
    seq.generate(words.begin(), words.end());
    for (std::size_t i = 0; i < seeds.size(); ++i)
      seeds[i] = (std::uint64_t{words[2 * i]} << 32) | words[2 * i + 1];
  }
  for (std::size_t i = 0; i < cfg_.task.scenarios.size(); ++i) {
    scenarios_.emplace_back(cfg_.task.scenarios[i], cfg_.task.episode_length, seeds[i]);
    scenarios_.back().check_limits(baseline_);
  }

  PlantConfig episode = baseline_;
  for (const auto& s : scenarios_) s.apply_parameters(0, baseline_, episode);

  const MeasurementMap raw = sim_.reset(episode);
  agent_ = sim_.controls();
  applied_ = agent_;
  published_.clear();
  step_ = 0;
  started_ = true;
  over_ = false;
  return finish(raw, true);
}

TimeStepRecord Environment::step(const std::vector<double>& action) {
  return step_controls(convert_action(action, cfg_.task.controls));
}

TimeStepRecord Environment::step_controls(const ControlMap& controls) {
  require(started_, Errc::Contract, "step before reset");
  require(!over_, Errc::Contract, "step after the episode ended; call reset");
  for (const auto& [id, v] : controls) {
    const auto& c = cfg_.task.controls;
    require(std::find(c.begin(), c.end(), id) != c.end(), Errc::IncompatibleId,
            "'" + id + "' is not controlled by task '" + cfg_.task.id + "'");
    agent_[id] = v;
  }
  ++step_;

  // Noise first, then freezes: a frozen control ignores agent and noise.
  ControlMap next = agent_;
  control_noise_.apply(next);
  for (const auto& s : scenarios_) s.apply_controls(step_, next, applied_);

  PlantConfig params = sim_.config();
  for (const auto& s : scenarios_) s.apply_parameters(step_, baseline_, params);
  for (const auto& [id, v] : params.parameters)
    if (v != sim_.config().parameter(id)) sim_.set_parameter(id, v);

  const MeasurementMap raw = sim_.step(next);
  applied_ = sim_.controls();
  return finish(raw, false);
}

TimeStepRecord Environment::finish(const MeasurementMap& raw, bool first) {
  MeasurementMap m = raw;
  measurement_noise_.apply(m);
  for (const auto& s : scenarios_) s.apply_measurements(step_, m, published_);
  published_ = m;

  const int chillers = sim_.config().chillers;
  Observation obs = pad_measurements(m, chillers, cfg_.max_chillers);

  std::map<std::string, double> values = obs;
  for (const auto& [id, v] : applied_) values[id] = v;
  const auto statuses = evaluate_constraints(values, cfg_.task.constraints);
  bool hard = false;
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    obs["violation." + cfg_.task.constraints[i].id] = status_code(statuses[i]);
    hard = hard || is_hard(statuses[i]);
  }
  for (const auto& [id, v] : applied_) obs["control." + id] = v;
  for (const auto& [id, v] : sim_.config().parameters) obs["config." + id] = v;
  obs["config.chillers"] = sim_.config().chillers;
  obs["config.towers"] = sim_.config().towers;
  obs["config.chilled_pumps"] = sim_.config().chilled_pumps;
  obs["config.condenser_pumps"] = sim_.config().condenser_pumps;
  obs["config.free_cooling_hex"] = sim_.config().free_cooling_hex;

  auto [r, extra] = task_reward_and_observations(cfg_.task, obs, statuses);
  for (auto& [id, v] : extra) obs[id] = v;
  obs["task.step"] = step_;
  obs["task.steps_remaining"] = cfg_.task.episode_length - step_;

  TimeStepRecord rec;
  rec.step = step_;
  rec.hard_violation = hard;
  rec.observation = std::move(obs);
  if (first) {
    rec.kind = StepKind::First;
    return rec;
  }
  rec.reward = r;
  if (hard || step_ >= cfg_.task.episode_length) {
    rec.kind = StepKind::Last;
    rec.discount = 0.0;
    over_ = true;
  } else {
    rec.kind = StepKind::Mid;
  }
  return rec;
}

nlohmann::json to_json(const TimeStepRecord& r) {
  nlohmann::json j{{"step", r.step},
                   {"kind", to_string(r.kind)},
                   {"discount", r.discount},
                   {"hard_violation", r.hard_violation},
                   {"observation", r.observation}};
  j["reward"] = r.reward ? nlohmann::json(*r.reward) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json trajectory_json(const EnvConfig& config, const std::vector<TimeStepRecord>& records) {
  const auto cfg = to_json(config);
  nlohmann::json j;
  j["metadata"] = {{"config_hash", config_hash(cfg)},
                   {"seed", config.seed},
                   {"task", config.task.id},
                   {"version", kVersion}};
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) j["records"].push_back(to_json(r));
  return j;
}

}  // namespace coolsim
