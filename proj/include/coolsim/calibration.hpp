#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/table.hpp"

namespace coolsim {

/// Which analytical model a telemetry table is fitted to. Column ids each
/// model expects are listed in `calibration_columns`.
enum class CalibrationModel {
  PumpPower,      // c12 from (pump_freq_hz, pump_power_kw)
  FanPower,       // c14 from (fan_freq_hz, fan_power_kw)
  PumpFlow,       // c11 from (pump_freq_hz, pump_flow_kgs)
  FanFlow,        // c13 from (fan_freq_hz, fan_airflow_kgs)
  MultiPumpFlow,  // a1, a2 from (pump_freq_sum_hz, n_pumps, n_chillers, condenser_flow_kgs)
  Tower,          // c8, c9, c10
  Chiller,        // A, B, D with C fixed by normalization
};

CalibrationModel parse_calibration_model(const std::string& id);
std::string to_string(CalibrationModel model);
std::vector<std::string> calibration_columns(CalibrationModel model);
int free_coefficients(CalibrationModel model);

struct CalibrationOptions {
  /// The Gordon-Ng form is invariant under a common scaling of A..D, so C is
  /// pinned to this value and the other three are fitted.
  double chiller_c_norm = 1.0;
  int max_iterations = 200;
};

struct CalibrationReport {
  std::string model;
  std::map<std::string, double> params;
  std::size_t rows = 0;
  double rmse = 0.0;
  double mean_output = 0.0;
  std::vector<double> residuals;  // predicted - observed, per row
  int iterations = 0;
};

CalibrationReport calibrate(CalibrationModel model, const DelimitedTable& telemetry,
                            const CalibrationOptions& options = {});

nlohmann::json to_json(const CalibrationReport& report);

}  // namespace coolsim
