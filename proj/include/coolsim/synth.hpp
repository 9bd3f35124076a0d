#pragma once

// Synthetic plant telemetry drawn from the forward models, for exercising
// the calibration fits against known coefficients.

#include <cstdint>
#include <map>
#include <string>

#include "coolsim/calibration.hpp"
#include "coolsim/plant_config.hpp"
#include "coolsim/table.hpp"

namespace coolsim {

struct SynthOptions {
  std::size_t rows = 200;
  double relative_noise = 0.0;  // gaussian, multiplies the observed output
  std::uint64_t seed = 0;
};

/// Pumps and fans come from the condenser bank, whose c13/c14 are the tower
/// fan gains.
DelimitedTable synthesize_telemetry(CalibrationModel model, const PlantCalibration& truth,
                                    const SynthOptions& options);

/// Coefficients a fit of `model` should recover from noiseless telemetry,
/// keyed like CalibrationReport::params. Chiller coefficients are rescaled
/// so that C equals `chiller_c_norm`.
std::map<std::string, double> generating_coefficients(CalibrationModel model, const PlantCalibration& truth,
                                                      double chiller_c_norm = 1.0);

}  // namespace coolsim
