#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "coolsim/components.hpp"
#include "coolsim/weather.hpp"

namespace coolsim {

/// Coefficients of every analytical model, as shipped in a calibration file.
struct PlantCalibration {
  ChillerParams chiller;  // cap_* are filled in at run time from the flows
  TowerParams tower;
  PumpFanParams condenser_pumps;  // c13/c14 are the tower fan gains
  PumpFanParams chilled_pumps;

  void validate() const;
};

PlantCalibration calibration_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PlantCalibration& c);
PlantCalibration load_calibration_file(const std::string& path);

struct NodeVolumes {
  double chw_return = 40.0;  // m3
  double chw_supply = 40.0;
  double chw_header = 5.0;
  double chiller_outlet = 3.0;
  double cw_basin = 30.0;
  double cw_tower_in = 15.0;
  double cw_header = 5.0;
  double condenser_outlet = 3.0;
};

/// Quadratic pressure-loss elements of the chilled distribution path.
struct PipeSegment {
  double length = 0.0;    // m
  double diameter = 0.3;  // m
  double friction = 0.02;
  double minor_loss = 0.0;  // dimensionless K

  /// dp = r * m^2 with dp in Pa, m in kg/s.
  double resistance() const;
};

struct LoopHydraulics {
  PipeSegment supply_main{200.0, 0.3, 0.02, 2.0};
  PipeSegment air_handler{0.0, 0.3, 0.02, 700.0};
  PipeSegment return_main{200.0, 0.3, 0.02, 2.0};

  /// Resistance between the supply probe and the pump inlet.
  double distribution_resistance() const;
};

struct PidTuning {
  double kp = 0.3;
  double ki = 0.06;  // 1/s
  double kd = 0.0;
};

/// Numeric parameters that scenarios may move during an episode, with their
/// admissible ranges.
struct ParameterLimits {
  double lower = 0.0;
  double upper = 0.0;
};

struct PlantConfig {
  int chillers = 3;
  int towers = 3;
  int chilled_pumps = 3;
  int condenser_pumps = 3;
  int free_cooling_hex = 3;

  PlantCalibration calibration;
  std::string calibration_file;  // informational, resolved at load time

  NodeVolumes volumes;
  LoopHydraulics hydraulics;

  double chiller_max_power = 700.0;          // kW per chiller
  double chiller_min_leaving_temp = 275.15;  // K, freeze protection
  double condenser_max_leaving_temp = 318.15;  // K, high head limit
  double hex_effectiveness = 0.7;
  double fan_max_freq = 60.0;   // Hz
  double pump_max_freq = 60.0;  // Hz

  PidTuning chiller_pid{0.3, 0.06, 0.0};
  PidTuning chilled_pump_pid{0.3, 0.06, 0.0};

  // Boundary and load. These are the scenario-mutable parameters.
  std::map<std::string, double> parameters;
  std::map<std::string, ParameterLimits> limits;
  std::vector<double> load_schedule;  // optional time-of-day profile, kW
  std::optional<std::string> weather_file;
  std::optional<WeatherSeries> weather;

  double step_seconds = 300.0;
  double max_substep_seconds = 5.0;
  bool warm_start = true;

  void validate() const;
  double parameter(const std::string& id) const;
  void set_parameter(const std::string& id, double value);
  LoadProfile load_profile() const;
  /// Weather seen at simulated time t: series or constant point, dry-bulb
  /// offset added, wet bulb re-derived at the point's humidity when offset.
  WeatherPoint weather_at(double t) const;
};

/// Scenario-mutable parameter ids with their defaults and limits.
const std::map<std::string, std::pair<double, ParameterLimits>>& default_parameters();

PlantConfig default_plant_config();
/// `base_dir` resolves relative calibration/weather paths.
PlantConfig plant_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
nlohmann::json to_json(const PlantConfig& c);
PlantConfig load_plant_config(const std::string& path);

/// SHA-256 of the canonical JSON dump, hex encoded.
std::string config_hash(const nlohmann::json& j);

}  // namespace coolsim
