#pragma once

// Lumped-parameter model of the two water loops. Pipes and headers are
// well-mixed control volumes; every component is an algebraic model evaluated
// from the temperatures probed at its inlet node, and its heat enters the
// node it discharges into. Flows are quasi-static.

#include <string>
#include <utility>
#include <vector>

#include "coolsim/components.hpp"
#include "coolsim/plant_config.hpp"
#include "coolsim/units.hpp"
#include "coolsim/weather.hpp"

namespace coolsim {

enum class Loop { Chilled, Condenser };

enum class EdgeKind {
  ChilledPump,
  HexChilledSide,
  Evaporator,
  ChillerBypass,
  ChillerHeader,
  SupplyMain,
  AirHandler,
  CondenserPump,
  HexCondenserSide,
  Condenser,
  CondenserBypass,
  CondenserHeader,
  TowerRiser,
  Tower,
};

struct Node {
  std::string id;
  Loop loop = Loop::Chilled;
  double volume = 1.0;  // m3
};

struct Edge {
  std::string id;
  int from = -1;
  int to = -1;
  EdgeKind kind = EdgeKind::SupplyMain;
  int unit = -1;  // chiller index for per-chiller branches
};

struct NetworkTopology {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int chillers = 0;

  // Frequently probed nodes.
  int chw_return = -1, chw_hex_out = -1, chw_pump_discharge = -1, chw_bank_leaving = -1,
      chw_supply = -1;
  int cw_basin = -1, cw_pump_discharge = -1, cw_hex_out = -1, cw_cond_leaving = -1,
      cw_tower_in = -1;
  std::vector<int> evap_out, cond_out;

  int node(const std::string& id) const;
  /// Closed loops, balanced in/out degree, no edge crossing loops, every
  /// component on exactly one node pair.
  void validate() const;
};

/// Setpoints in SI units as routed to the low-level loops.
struct PlantControls {
  int chillers_enabled = 1;
  int chilled_pumps = 1;
  int condenser_pumps = 1;
  int free_cooling_hex = 1;
  double chiller_leaving_temp = units::fahrenheit_to_kelvin(48.0);
  double tower_return_temp = units::fahrenheit_to_kelvin(55.0);
  double condenser_flow = 50.0;            // kg/s
  double diff_pressure = units::psi_to_pa(15.0);
};

struct Boundary {
  WeatherPoint weather;
  double building_load = 0.0;    // kW into the chilled return
  double pipe_heat_gain = 0.0;   // kW/K between ambient dry bulb and supply main
};

struct NodeState {
  double temperature = 290.0;  // K
  double mass_flow = 0.0;      // kg/s through the node
  double diff_pressure = 0.0;  // Pa relative to the chilled-pump inlet
};

struct ChillerState {
  bool enabled = false;
  double ramp = 0.0;  // branch flow weight, moves toward enabled over one step
  PidState pid;
  double compressor_power = 0.0;  // kW
  double q_evaporator = 0.0;      // kW
  double q_condenser = 0.0;       // kW
  double chilled_flow = 0.0;      // kg/s
  double condenser_flow = 0.0;    // kg/s
  double leaving_temp = 0.0;      // K, evaporator outlet
  double condenser_leaving_temp = 0.0;  // K
};

struct LoopEnergy {
  double heat_in = 0.0;   // kJ over the last advance
  double heat_out = 0.0;  // kJ
  double storage = 0.0;   // kJ change of stored energy
  double residual() const { return heat_in - heat_out - storage; }
};

struct SimState {
  std::vector<NodeState> nodes;
  std::vector<double> edge_flows;  // kg/s per topology edge, last substep
  std::vector<ChillerState> chillers;
  PidState chilled_pump_pid;
  double chilled_pump_freq = 0.0;    // Hz, each running pump
  double condenser_pump_freq = 0.0;  // Hz, each running pump
  double fan_freq = 0.0;             // Hz, each tower fan
  double chilled_flow = 0.0;         // kg/s
  double condenser_flow = 0.0;       // kg/s
  double hex_heat = 0.0;             // kW
  double tower_heat = 0.0;           // kW
  double chilled_pump_power = 0.0;   // kW, bank
  double condenser_pump_power = 0.0; // kW, bank
  double fan_power = 0.0;            // kW, all towers
  double diff_pressure = 0.0;        // Pa at the supply probe
  double clock = 0.0;                // s
  int last_substeps = 0;
  LoopEnergy chilled_energy;
  LoopEnergy condenser_energy;

  double compressor_power() const;
  double total_power() const;
};

struct Network {
  PlantConfig config;
  NetworkTopology topology;
};

std::pair<Network, SimState> build_network(const PlantConfig& config);

/// Stored energy per loop, kJ relative to 0 K.
double loop_energy(const Network& net, const SimState& state, Loop loop);
double loop_mass(const Network& net, const SimState& state, Loop loop);

/// Sanity band for node temperatures.
constexpr double kMinNodeTemp = 260.0;
constexpr double kMaxNodeTemp = 380.0;

SimState advance(const Network& net, const SimState& state, const PlantControls& controls,
                 const Boundary& boundary, double dt);

struct SteadyResult {
  SimState state;
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;  // max |dT| of the final step, K
};

SteadyResult solve_steady(const Network& net, const SimState& state, const PlantControls& controls,
                          const Boundary& boundary, int max_iterations = 3000,
                          double tolerance = 1e-4);

}  // namespace coolsim
