#include "coolsim/ids.hpp"

#include <algorithm>

#include "coolsim/errors.hpp"

namespace coolsim::ids {

const std::vector<ActionSpec>& action_specs() {
  static const std::vector<ActionSpec> specs{
      {kNumChillers, "-", true, 1, 0, 3},
      {kNumChilledPumps, "-", true, 1, 1, 3},
      {kNumCondenserPumps, "-", true, 1, 1, 3},
      {kChillerLeavingTemp, "degF", false, 48, 40, 75},
      {kTowerReturnTemp, "degF", false, 55, 32, 90},
      {kCondenserFlow, "kg/s", false, 50, 10, 200},
      {kDiffPressure, "psi", false, 15, 0.1, 50},
      {kNumFreeCoolingHex, "-", true, 1, 1, 3},
  };
  return specs;
}

const ActionSpec& action_spec(const std::string& id) {
  for (const auto& s : action_specs())
    if (s.id == id) return s;
  fail(Errc::MissingId, "unknown action id '" + id + "'");
}

bool is_action(const std::string& id) {
  const auto& s = action_specs();
  return std::any_of(s.begin(), s.end(), [&](const auto& a) { return a.id == id; });
}

const std::vector<ObservationSpec>& observation_specs() {
  static const std::vector<ObservationSpec> specs{
      {kBuildingLoad, "kW", false, false},
      {kDryBulb, "degF", false, false},
      {kWetBulb, "degF", false, false},
      {kRelHumidity, "-", false, false},
      {kCondenserLeavingTemp, "degF", false, true},
      {kChilledFlow, "kg/s", false, true},
      {kCompressorPower, "kW", false, true},
      {kTowerFanPower, "kW", false, false},
      {kCondenserPumpPower, "kW", false, false},
      {kChilledPumpPower, "kW", false, false},
      {kBankLeavingTemp, "degF", false, false},
      {kSupplyTemp, "degF", false, false},
      {kReturnTemp, "degF", false, false},
      {kChillersEnabled, "-", true, false},
  };
  return specs;
}

std::string chiller_id(int index, const std::string& field) {
  return "chiller_" + std::to_string(index + 1) + "." + field;
}

std::string mask_id(int index) { return "mask.chiller_" + std::to_string(index + 1); }

std::vector<std::string> measurement_ids(int chillers) {
  std::vector<std::string> out;
  for (const auto& s : observation_specs()) {
    if (!s.per_chiller) {
      out.push_back(s.id);
      continue;
    }
    for (int i = 0; i < chillers; ++i) out.push_back(chiller_id(i, s.id));
  }
  return out;
}

std::vector<std::string> power_ids(int chillers) {
  std::vector<std::string> out;
  for (int i = 0; i < chillers; ++i) out.push_back(chiller_id(i, kCompressorPower));
  out.insert(out.end(), {kTowerFanPower, kCondenserPumpPower, kChilledPumpPower});
  return out;
}

bool is_measurement(const std::string& id, int chillers) {
  const auto all = measurement_ids(chillers);
  return std::find(all.begin(), all.end(), id) != all.end();
}

}  // namespace coolsim::ids
