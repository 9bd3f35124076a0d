#include "coolsim/facility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coolsim/errors.hpp"
#include "coolsim/ids.hpp"
#include "coolsim/units.hpp"
#include "coolsim/weather.hpp"

namespace coolsim {

ControlMap default_controls() {
  ControlMap c;
  for (const auto& s : ids::action_specs()) c[s.id] = s.default_value;
  return c;
}

double quantize(double v) { return std::round(v); }

namespace {

double equipment_cap(const std::string& id, const PlantConfig& cfg) {
  if (id == ids::kNumChillers) return cfg.chillers;
  if (id == ids::kNumChilledPumps) return cfg.chilled_pumps;
  if (id == ids::kNumCondenserPumps) return cfg.condenser_pumps;
  if (id == ids::kNumFreeCoolingHex) return cfg.free_cooling_hex;
  return std::numeric_limits<double>::infinity();
}

}  // namespace

ControlMap clamp_controls(const ControlMap& controls, const PlantConfig& config,
                          std::vector<std::string>* clamped) {
  ControlMap out;
  for (const auto& [id, v] : controls) {
    const auto& spec = ids::action_spec(id);
    require(std::isfinite(v), Errc::InvalidArgument, "control '" + id + "' is not finite");
    const double hi = std::min(spec.maximum, equipment_cap(id, config));
    double x = std::clamp(v, spec.minimum, std::max(spec.minimum, hi));
    if (spec.integer) x = std::clamp(quantize(x), spec.minimum, std::max(spec.minimum, hi));
    // Rounding alone is not a clamp; only report values pushed off range.
    if (clamped && (v < spec.minimum || v > hi)) clamped->push_back(id);
    out[id] = x;
  }
  return out;
}

PlantControls to_plant_controls(const ControlMap& c) {
  auto get = [&](const char* id) {
    const auto it = c.find(id);
    if (it == c.end()) fail(Errc::MissingId, std::string("control '") + id + "' missing");
    return it->second;
  };
  PlantControls p;
  p.chillers_enabled = static_cast<int>(get(ids::kNumChillers));
  p.chilled_pumps = static_cast<int>(get(ids::kNumChilledPumps));
  p.condenser_pumps = static_cast<int>(get(ids::kNumCondenserPumps));
  p.free_cooling_hex = static_cast<int>(get(ids::kNumFreeCoolingHex));
  p.chiller_leaving_temp = units::fahrenheit_to_kelvin(get(ids::kChillerLeavingTemp));
  p.tower_return_temp = units::fahrenheit_to_kelvin(get(ids::kTowerReturnTemp));
  p.condenser_flow = get(ids::kCondenserFlow);
  p.diff_pressure = units::psi_to_pa(get(ids::kDiffPressure));
  return p;
}

Boundary boundary_at(const PlantConfig& config, double t) {
  Boundary b;
  b.weather = config.weather_at(t);
  b.building_load = load_at(config.load_profile(), b.weather, config.parameter("start_time_s") + t);
  b.pipe_heat_gain = config.parameter("pipe_heat_gain_kw_per_k");
  return b;
}

MeasurementMap measure(const Network& net, const SimState& s, const Boundary& b) {
  using units::kelvin_to_fahrenheit;
  const auto& topo = net.topology;
  MeasurementMap m;
  m[ids::kBuildingLoad] = b.building_load;
  m[ids::kDryBulb] = kelvin_to_fahrenheit(b.weather.t_dry_bulb);
  m[ids::kWetBulb] = kelvin_to_fahrenheit(b.weather.t_wet_bulb);
  m[ids::kRelHumidity] = b.weather.rel_humidity;
  int enabled = 0;
  for (int i = 0; i < topo.chillers; ++i) {
    const auto& ch = s.chillers[i];
    enabled += ch.enabled ? 1 : 0;
    m[ids::chiller_id(i, ids::kCondenserLeavingTemp)] =
        kelvin_to_fahrenheit(s.nodes[topo.cond_out[i]].temperature);
    m[ids::chiller_id(i, ids::kChilledFlow)] = ch.chilled_flow;
    m[ids::chiller_id(i, ids::kCompressorPower)] = ch.enabled ? ch.compressor_power : 0.0;
  }
  m[ids::kTowerFanPower] = s.fan_power;
  m[ids::kCondenserPumpPower] = s.condenser_pump_power;
  m[ids::kChilledPumpPower] = s.chilled_pump_power;
  m[ids::kBankLeavingTemp] = kelvin_to_fahrenheit(s.nodes[topo.chw_bank_leaving].temperature);
  m[ids::kSupplyTemp] = kelvin_to_fahrenheit(s.nodes[topo.chw_supply].temperature);
  m[ids::kReturnTemp] = kelvin_to_fahrenheit(s.nodes[topo.chw_return].temperature);
  m[ids::kChillersEnabled] = enabled;
  return m;
}

// ---------------------------------------------------------------------------

MeasurementMap FacilitySimulator::reset(const PlantConfig& config) {
  auto [net, state] = build_network(config);
  net_ = std::move(net);
  controls_ = clamp_controls(default_controls(), net_.config);
  clamped_.clear();
  boundary_ = boundary_at(net_.config, 0.0);
  if (net_.config.warm_start) {
    const std::string key = config_hash(to_json(net_.config));
    const auto hit = settled_.find(key);
    if (hit != settled_.end()) {
      state = hit->second;
    } else {
      const auto r = solve_steady(net_, state, to_plant_controls(controls_), boundary_);
      state = r.state;
      state.clock = 0.0;
      state.chilled_energy = {};
      state.condenser_energy = {};
      settled_[key] = state;
    }
  }
  state_ = std::move(state);
  measurements_ = measure(net_, state_, boundary_);
  ready_ = true;
  return measurements_;
}

MeasurementMap FacilitySimulator::step(const ControlMap& controls) {
  require_ready();
  clamped_.clear();
  ControlMap merged = controls_;
  for (const auto& [id, v] : clamp_controls(controls, net_.config, &clamped_)) merged[id] = v;
  controls_ = merged;
  const Boundary b = boundary_at(net_.config, state_.clock);
  state_ = advance(net_, state_, to_plant_controls(controls_), b, net_.config.step_seconds);
  boundary_ = boundary_at(net_.config, state_.clock);
  measurements_ = measure(net_, state_, boundary_);
  return measurements_;
}

void FacilitySimulator::set_parameter(const std::string& id, double value) {
  require_ready();
  net_.config.set_parameter(id, value);
}

const PlantConfig& FacilitySimulator::config() const {
  require_ready();
  return net_.config;
}

const Network& FacilitySimulator::network() const {
  require_ready();
  return net_;
}

const SimState& FacilitySimulator::state() const {
  require_ready();
  return state_;
}

double FacilitySimulator::total_power() const {
  require_ready();
  return state_.total_power();
}

void FacilitySimulator::require_ready() const {
  require(ready_, Errc::Contract, "simulator used before reset");
}

}  // namespace coolsim
