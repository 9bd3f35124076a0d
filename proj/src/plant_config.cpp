#include "coolsim/plant_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "coolsim/errors.hpp"
#include "coolsim/units.hpp"

namespace coolsim {

namespace {

using nlohmann::json;

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

PumpFanParams pump_fan_from_json(const json& j, const PumpFanParams& fallback) {
  PumpFanParams p = fallback;
  read_opt(j, "c11", p.c11);
  read_opt(j, "c12", p.c12);
  read_opt(j, "c13", p.c13);
  read_opt(j, "c14", p.c14);
  read_opt(j, "a1", p.a1);
  read_opt(j, "a2", p.a2);
  return p;
}

json pump_fan_to_json(const PumpFanParams& p) {
  return {{"c11", p.c11}, {"c12", p.c12}, {"c13", p.c13},
          {"c14", p.c14}, {"a1", p.a1},   {"a2", p.a2}};
}

PipeSegment pipe_from_json(const json& j, PipeSegment p) {
  read_opt(j, "length_m", p.length);
  read_opt(j, "diameter_m", p.diameter);
  read_opt(j, "friction", p.friction);
  read_opt(j, "minor_loss", p.minor_loss);
  return p;
}

json pipe_to_json(const PipeSegment& p) {
  return {{"length_m", p.length},
          {"diameter_m", p.diameter},
          {"friction", p.friction},
          {"minor_loss", p.minor_loss}};
}

PidTuning pid_from_json(const json& j, PidTuning p) {
  read_opt(j, "kp", p.kp);
  read_opt(j, "ki", p.ki);
  read_opt(j, "kd", p.kd);
  return p;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

// ---------------------------------------------------------------------------

void PlantCalibration::validate() const {
  require(std::isfinite(chiller.a_coef) && std::isfinite(chiller.b_coef) &&
              std::isfinite(chiller.d_coef) && chiller.c_coef != 0.0,
          Errc::InvalidArgument, "calibration: chiller coefficients invalid");
  tower.validate();
  condenser_pumps.validate();
  chilled_pumps.validate();
}

PlantCalibration calibration_from_json(const json& j) {
  PlantCalibration c;
  const auto& ch = j.at("chiller");
  c.chiller.a_coef = ch.at("a").get<double>();
  c.chiller.b_coef = ch.at("b").get<double>();
  c.chiller.c_coef = ch.value("c", 1.0);
  c.chiller.d_coef = ch.at("d").get<double>();
  const auto& tw = j.at("tower");
  c.tower = {tw.at("c8").get<double>(), tw.at("c9").get<double>(), tw.at("c10").get<double>()};
  c.condenser_pumps = pump_fan_from_json(j.at("condenser_pumps"), PumpFanParams{});
  // Chilled pumps serve no fans; missing fan gains fall back to the tower's.
  PumpFanParams chw_defaults = c.condenser_pumps;
  c.chilled_pumps = pump_fan_from_json(j.at("chilled_pumps"), chw_defaults);
  c.validate();
  return c;
}

json to_json(const PlantCalibration& c) {
  return {{"chiller",
           {{"a", c.chiller.a_coef}, {"b", c.chiller.b_coef}, {"c", c.chiller.c_coef},
            {"d", c.chiller.d_coef}}},
          {"tower", {{"c8", c.tower.c8}, {"c9", c.tower.c9}, {"c10", c.tower.c10}}},
          {"condenser_pumps", pump_fan_to_json(c.condenser_pumps)},
          {"chilled_pumps", pump_fan_to_json(c.chilled_pumps)}};
}

PlantCalibration load_calibration_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Parse, "cannot open calibration file '" + path + "'");
  try {
    return calibration_from_json(json::parse(in));
  } catch (const json::exception& e) {
    fail(Errc::Parse, "calibration file '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------

double PipeSegment::resistance() const {
  require(diameter > 0.0 && length >= 0.0 && friction >= 0.0 && minor_loss >= 0.0,
          Errc::InvalidArgument, "pipe segment parameters out of range");
  const double area = std::numbers::pi * diameter * diameter / 4.0;
  return (friction * length / diameter + minor_loss) /
         (2.0 * units::kWaterDensity * area * area);
}

double LoopHydraulics::distribution_resistance() const {
  return air_handler.resistance() + return_main.resistance();
}

const std::map<std::string, std::pair<double, ParameterLimits>>& default_parameters() {
  static const std::map<std::string, std::pair<double, ParameterLimits>> params{
      {"dry_bulb_k", {288.15, {258.15, 323.15}}},
      {"dry_bulb_offset_k", {0.0, {-30.0, 30.0}}},
      {"rel_humidity", {0.5, {0.05, 1.0}}},
      {"load_base_kw", {600.0, {0.0, 6000.0}}},
      {"load_gain_kw_per_k", {40.0, {0.0, 400.0}}},
      {"load_ref_k", {291.15, {258.15, 323.15}}},
      {"pipe_heat_gain_kw_per_k", {15.0, {0.0, 200.0}}},
      {"initial_chw_temp_k", {282.0, {270.0, 320.0}}},
      {"initial_cw_temp_k", {295.0, {270.0, 330.0}}},
      {"start_time_s", {0.0, {0.0, 1e9}}},
  };
  return params;
}

PlantConfig default_plant_config() {
  PlantConfig c;
  c.calibration.chiller = {30.0, -1.12, 1.0, -6e-5, 1.0, 1.0};
  c.calibration.tower = {-0.03, 0.3, 0.8};
  c.calibration.condenser_pumps = {1.0, 4e-4, 2.0, 2.4e-4, 4.0, 0.5};
  c.calibration.chilled_pumps = {1.0, 4e-4, 2.0, 2.4e-4, 3.0, 0.3};
  c.hydraulics.air_handler.minor_loss = 55.0;
  for (const auto& [id, v] : default_parameters()) {
    c.parameters[id] = v.first;
    c.limits[id] = v.second;
  }
  return c;
}

void PlantConfig::validate() const {
  require(chillers >= 1 && chillers <= 3, Errc::InvalidTopology, "chillers must be in 1..3");
  require(towers >= 1 && towers <= 3, Errc::InvalidTopology, "towers must be in 1..3");
  require(chilled_pumps >= 1 && chilled_pumps <= 3, Errc::InvalidTopology,
          "chilled pumps must be in 1..3");
  require(condenser_pumps >= 1 && condenser_pumps <= 3, Errc::InvalidTopology,
          "condenser pumps must be in 1..3");
  require(free_cooling_hex >= 1 && free_cooling_hex <= 3, Errc::InvalidTopology,
          "free-cooling heat exchangers must be in 1..3");
  calibration.validate();
  calibration.condenser_pumps.validate_topology(condenser_pumps, 0);
  calibration.chilled_pumps.validate_topology(chilled_pumps, 0);
  for (double v : {volumes.chw_return, volumes.chw_supply, volumes.chw_header,
                   volumes.chiller_outlet, volumes.cw_basin, volumes.cw_tower_in,
                   volumes.cw_header, volumes.condenser_outlet}) {
    require(v > 0.0, Errc::InvalidTopology, "node volumes must be positive");
  }
  require(hydraulics.distribution_resistance() > 0.0, Errc::InvalidTopology,
          "distribution path needs a positive flow resistance");
  require(chiller_max_power > calibration.chiller.a_coef / calibration.chiller.c_coef,
          Errc::InvalidArgument, "chiller max power must exceed the idle power");
  require(hex_effectiveness > 0.0 && hex_effectiveness < 1.0, Errc::InvalidArgument,
          "heat-exchanger effectiveness must be in (0, 1)");
  require(fan_max_freq > 0.0 && pump_max_freq > 0.0, Errc::InvalidArgument,
          "maximum frequencies must be positive");
  require(step_seconds > 0.0 && max_substep_seconds > 0.0, Errc::InvalidArgument,
          "time steps must be positive");
  for (const auto& [id, spec] : default_parameters()) {
    const auto it = parameters.find(id);
    require(it != parameters.end(), Errc::MissingId, "missing parameter '" + id + "'");
    const auto& lim = limits.at(id);
    require(lim.lower <= lim.upper, Errc::InvalidArgument, "bad limits for '" + id + "'");
    require(it->second >= lim.lower && it->second <= lim.upper, Errc::LimitViolation,
            "parameter '" + id + "' outside its limits");
  }
  for (double v : load_schedule)
    require(v >= 0.0, Errc::InvalidArgument, "load schedule entries must be nonnegative");
  if (weather) weather->validate();
}

double PlantConfig::parameter(const std::string& id) const {
  const auto it = parameters.find(id);
  if (it == parameters.end()) fail(Errc::MissingId, "unknown configuration parameter '" + id + "'");
  return it->second;
}

void PlantConfig::set_parameter(const std::string& id, double value) {
  const auto it = parameters.find(id);
  if (it == parameters.end()) fail(Errc::MissingId, "unknown configuration parameter '" + id + "'");
  const auto& lim = limits.at(id);
  if (!(value >= lim.lower && value <= lim.upper)) {
    std::ostringstream msg;
    msg << "parameter '" << id << "' = " << value << " outside [" << lim.lower << ", " << lim.upper
        << "]";
    fail(Errc::LimitViolation, msg.str());
  }
  it->second = value;
}

LoadProfile PlantConfig::load_profile() const {
  LoadProfile p;
  p.schedule = load_schedule.empty() ? std::vector<double>{parameter("load_base_kw")} : load_schedule;
  p.dry_bulb_gain = parameter("load_gain_kw_per_k");
  p.reference_temp = parameter("load_ref_k");
  return p;
}

WeatherPoint PlantConfig::weather_at(double t) const {
  const double offset = parameter("dry_bulb_offset_k");
  WeatherPoint base;
  if (weather) {
    base = sample(*weather, parameter("start_time_s") + t);
  } else {
    base = weather_from_dry_bulb(parameter("dry_bulb_k"), parameter("rel_humidity"));
  }
  if (offset == 0.0) return base;
  return weather_from_dry_bulb(base.t_dry_bulb + offset, base.rel_humidity);
}

// ---------------------------------------------------------------------------

PlantConfig plant_config_from_json(const json& j, const std::string& base_dir) {
  PlantConfig c = default_plant_config();
  try {
    if (j.contains("topology")) {
      const auto& t = j.at("topology");
      read_opt(t, "chillers", c.chillers);
      read_opt(t, "towers", c.towers);
      read_opt(t, "chilled_pumps", c.chilled_pumps);
      read_opt(t, "condenser_pumps", c.condenser_pumps);
      read_opt(t, "free_cooling_hex", c.free_cooling_hex);
    }
    if (j.contains("calibration")) {
      const auto& cal = j.at("calibration");
      if (cal.is_string()) {
        c.calibration_file = resolve(base_dir, cal.get<std::string>());
        c.calibration = load_calibration_file(c.calibration_file);
      } else {
        c.calibration = calibration_from_json(cal);
      }
    }
    if (j.contains("volumes_m3")) {
      const auto& v = j.at("volumes_m3");
      read_opt(v, "chw_return", c.volumes.chw_return);
      read_opt(v, "chw_supply", c.volumes.chw_supply);
      read_opt(v, "chw_header", c.volumes.chw_header);
      read_opt(v, "chiller_outlet", c.volumes.chiller_outlet);
      read_opt(v, "cw_basin", c.volumes.cw_basin);
      read_opt(v, "cw_tower_in", c.volumes.cw_tower_in);
      read_opt(v, "cw_header", c.volumes.cw_header);
      read_opt(v, "condenser_outlet", c.volumes.condenser_outlet);
    }
    if (j.contains("hydraulics")) {
      const auto& h = j.at("hydraulics");
      if (h.contains("supply_main"))
        c.hydraulics.supply_main = pipe_from_json(h.at("supply_main"), c.hydraulics.supply_main);
      if (h.contains("air_handler"))
        c.hydraulics.air_handler = pipe_from_json(h.at("air_handler"), c.hydraulics.air_handler);
      if (h.contains("return_main"))
        c.hydraulics.return_main = pipe_from_json(h.at("return_main"), c.hydraulics.return_main);
    }
    if (j.contains("equipment")) {
      const auto& e = j.at("equipment");
      read_opt(e, "chiller_max_power_kw", c.chiller_max_power);
      read_opt(e, "chiller_min_leaving_temp_k", c.chiller_min_leaving_temp);
      read_opt(e, "condenser_max_leaving_temp_k", c.condenser_max_leaving_temp);
      read_opt(e, "hex_effectiveness", c.hex_effectiveness);
      read_opt(e, "fan_max_freq_hz", c.fan_max_freq);
      read_opt(e, "pump_max_freq_hz", c.pump_max_freq);
    }
    if (j.contains("pid")) {
      const auto& p = j.at("pid");
      if (p.contains("chiller")) c.chiller_pid = pid_from_json(p.at("chiller"), c.chiller_pid);
      if (p.contains("chilled_pump"))
        c.chilled_pump_pid = pid_from_json(p.at("chilled_pump"), c.chilled_pump_pid);
    }
    if (j.contains("parameters")) {
      for (const auto& [id, v] : j.at("parameters").items()) {
        require(c.parameters.count(id) > 0, Errc::MissingId, "unknown parameter '" + id + "'");
        c.parameters[id] = v.get<double>();
      }
    }
    if (j.contains("limits")) {
      for (const auto& [id, v] : j.at("limits").items()) {
        require(c.limits.count(id) > 0, Errc::MissingId, "unknown parameter '" + id + "'");
        c.limits[id] = {v.at(0).get<double>(), v.at(1).get<double>()};
      }
    }
    read_opt(j, "load_schedule_kw", c.load_schedule);
    if (j.contains("weather_file")) {
      c.weather_file = resolve(base_dir, j.at("weather_file").get<std::string>());
      c.weather = load_weather_file(*c.weather_file);
    } else if (j.contains("weather_samples")) {
      WeatherSeries series;
      for (const auto& row : j.at("weather_samples"))
        series.samples.push_back({row.at(0).get<double>(),
                                  {row.at(1).get<double>(), row.at(2).get<double>(),
                                   row.at(3).get<double>()}});
      c.weather = series;
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      read_opt(s, "step_s", c.step_seconds);
      read_opt(s, "max_substep_s", c.max_substep_seconds);
      read_opt(s, "warm_start", c.warm_start);
    }
  } catch (const json::exception& e) {
    fail(Errc::Parse, std::string("plant config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const PlantConfig& c) {
  json j;
  j["topology"] = {{"chillers", c.chillers},
                   {"towers", c.towers},
                   {"chilled_pumps", c.chilled_pumps},
                   {"condenser_pumps", c.condenser_pumps},
                   {"free_cooling_hex", c.free_cooling_hex}};
  j["calibration"] = to_json(c.calibration);
  j["volumes_m3"] = {{"chw_return", c.volumes.chw_return},
                     {"chw_supply", c.volumes.chw_supply},
                     {"chw_header", c.volumes.chw_header},
                     {"chiller_outlet", c.volumes.chiller_outlet},
                     {"cw_basin", c.volumes.cw_basin},
                     {"cw_tower_in", c.volumes.cw_tower_in},
                     {"cw_header", c.volumes.cw_header},
                     {"condenser_outlet", c.volumes.condenser_outlet}};
  j["hydraulics"] = {{"supply_main", pipe_to_json(c.hydraulics.supply_main)},
                     {"air_handler", pipe_to_json(c.hydraulics.air_handler)},
                     {"return_main", pipe_to_json(c.hydraulics.return_main)}};
  j["equipment"] = {{"chiller_max_power_kw", c.chiller_max_power},
                    {"chiller_min_leaving_temp_k", c.chiller_min_leaving_temp},
                    {"condenser_max_leaving_temp_k", c.condenser_max_leaving_temp},
                    {"hex_effectiveness", c.hex_effectiveness},
                    {"fan_max_freq_hz", c.fan_max_freq},
                    {"pump_max_freq_hz", c.pump_max_freq}};
  j["pid"] = {{"chiller", {{"kp", c.chiller_pid.kp}, {"ki", c.chiller_pid.ki}, {"kd", c.chiller_pid.kd}}},
              {"chilled_pump",
               {{"kp", c.chilled_pump_pid.kp},
                {"ki", c.chilled_pump_pid.ki},
                {"kd", c.chilled_pump_pid.kd}}}};
  j["parameters"] = c.parameters;
  json lim = json::object();
  for (const auto& [id, l] : c.limits) lim[id] = {l.lower, l.upper};
  j["limits"] = lim;
  if (!c.load_schedule.empty()) j["load_schedule_kw"] = c.load_schedule;
  if (c.weather) {
    json rows = json::array();
    for (const auto& s : c.weather->samples)
      rows.push_back({s.timestamp, s.point.t_dry_bulb, s.point.t_wet_bulb, s.point.rel_humidity});
    j["weather_samples"] = rows;
  }
  j["solver"] = {{"step_s", c.step_seconds},
                 {"max_substep_s", c.max_substep_seconds},
                 {"warm_start", c.warm_start}};
  return j;
}

PlantConfig load_plant_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Parse, "cannot open plant config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::Parse, "plant config '" + path + "': " + e.what());
  }
  return plant_config_from_json(j, std::filesystem::path(path).parent_path().string());
}

std::string config_hash(const json& j) {
  const std::string text = j.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

}  // namespace coolsim
