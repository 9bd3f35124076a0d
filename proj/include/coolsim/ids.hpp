#pragma once

// Canonical action and observation ids. These strings are the wire
// vocabulary shared by the simulator, the environment, the CLI, trajectory
// files and any foreign binding; docs/ids.md lists them with units.

#include <string>
#include <vector>

namespace coolsim::ids {

inline constexpr const char* kNumChillers = "num_chillers";
inline constexpr const char* kNumChilledPumps = "num_chilled_pumps";
inline constexpr const char* kNumCondenserPumps = "num_condenser_pumps";
inline constexpr const char* kChillerLeavingTemp = "chiller_leaving_temp_f";
inline constexpr const char* kTowerReturnTemp = "tower_return_temp_f";
inline constexpr const char* kCondenserFlow = "condenser_flow_kgs";
inline constexpr const char* kDiffPressure = "diff_pressure_psi";
inline constexpr const char* kNumFreeCoolingHex = "num_free_cooling_hex";

inline constexpr const char* kBuildingLoad = "building_load_kw";
inline constexpr const char* kDryBulb = "dry_bulb_f";
inline constexpr const char* kWetBulb = "wet_bulb_f";
inline constexpr const char* kRelHumidity = "rel_humidity";
inline constexpr const char* kTowerFanPower = "tower_fan_power_kw";
inline constexpr const char* kCondenserPumpPower = "condenser_pump_power_kw";
inline constexpr const char* kChilledPumpPower = "chilled_pump_power_kw";
inline constexpr const char* kBankLeavingTemp = "chiller_bank_leaving_temp_f";
inline constexpr const char* kSupplyTemp = "chw_supply_temp_f";
inline constexpr const char* kReturnTemp = "chw_return_temp_f";
inline constexpr const char* kChillersEnabled = "chillers_enabled";

// Per-chiller fields, prefixed with "chiller_<n>." (n from 1).
inline constexpr const char* kCondenserLeavingTemp = "condenser_leaving_temp_f";
inline constexpr const char* kChilledFlow = "chilled_flow_kgs";
inline constexpr const char* kCompressorPower = "compressor_power_kw";

/// Largest plant the padded observation frame holds.
inline constexpr int kMaxChillers = 3;

struct ActionSpec {
  std::string id;
  std::string unit;
  bool integer = false;
  double default_value = 0.0;
  double minimum = 0.0;
  double maximum = 0.0;
};

struct ObservationSpec {
  std::string id;
  std::string unit;
  bool integer = false;
  bool per_chiller = false;
};

const std::vector<ActionSpec>& action_specs();
const ActionSpec& action_spec(const std::string& id);
bool is_action(const std::string& id);

/// Plant-level observations followed by the per-chiller field templates.
const std::vector<ObservationSpec>& observation_specs();

std::string chiller_id(int index, const std::string& field);  // index from 0
std::string mask_id(int index);                               // "mask.chiller_<n>"

/// Every observation id of a plant with `chillers` chillers.
std::vector<std::string> measurement_ids(int chillers);
/// Power observables whose sum is the plant electrical power.
std::vector<std::string> power_ids(int chillers);
bool is_measurement(const std::string& id, int chillers = kMaxChillers);

}  // namespace coolsim::ids
