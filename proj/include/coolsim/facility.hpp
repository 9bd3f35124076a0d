#pragma once

// Supervisory facade over the hydronic network: reset with a configuration,
// step with Table-style setpoints, read back measurements keyed by the
// canonical ids.

#include <map>
#include <string>
#include <vector>

#include "coolsim/network.hpp"
#include "coolsim/plant_config.hpp"

namespace coolsim {

using MeasurementMap = std::map<std::string, double>;
using ControlMap = std::map<std::string, double>;

/// Every action id at its default value.
ControlMap default_controls();

/// Round half away from zero.
double quantize(double v);

/// Clamps each present id to its action range (and count ids to the
/// configured equipment), quantizes integer ids, and lists every id whose
/// value had to move. Unknown ids are rejected.
ControlMap clamp_controls(const ControlMap& controls, const PlantConfig& config,
                          std::vector<std::string>* clamped = nullptr);

/// Boundary units to SI. Expects a complete, clamped map.
PlantControls to_plant_controls(const ControlMap& controls);

/// Weather and load seen by the plant at simulated time t.
Boundary boundary_at(const PlantConfig& config, double t);

MeasurementMap measure(const Network& net, const SimState& state, const Boundary& boundary);

class FacilitySimulator {
 public:
  /// Builds the plant, installs the default setpoints and, when the config
  /// asks for it, settles the loops at those setpoints before returning.
  MeasurementMap reset(const PlantConfig& config);

  /// Ids missing from `controls` keep their current value.
  MeasurementMap step(const ControlMap& controls);

  /// Changes a scenario-mutable parameter for subsequent steps.
  void set_parameter(const std::string& id, double value);

  bool ready() const { return ready_; }
  const PlantConfig& config() const;
  const Network& network() const;
  const SimState& state() const;
  const ControlMap& controls() const { return controls_; }
  const MeasurementMap& measurements() const { return measurements_; }
  const Boundary& boundary() const { return boundary_; }
  const std::vector<std::string>& last_clamped() const { return clamped_; }
  /// Total electrical power of the last state, kW.
  double total_power() const;

 private:
  void require_ready() const;

  bool ready_ = false;
  Network net_;
  SimState state_;
  ControlMap controls_;
  MeasurementMap measurements_;
  Boundary boundary_;
  std::vector<std::string> clamped_;
  // Settled states keyed by config hash; resets with the same config skip
  // the settling solve.
  std::map<std::string, SimState> settled_;
};

}  // namespace coolsim
