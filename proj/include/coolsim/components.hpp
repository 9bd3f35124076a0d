#pragma once

// Stateless analytical models for the plant equipment: the Gordon-Ng chiller,
// the evaporative cooling tower, affinity-law pumps and fans, their multi-unit
// forms and setpoint inverses, and the positional PID law used by the
// low-level loops. All functions are pure.

#include <span>

namespace coolsim {

/// Gordon-Ng coefficients of one chiller plus the water-side thermal
/// capacitances (mass flow times specific heat) seen by it at this instant.
struct ChillerParams {
  double a_coef = 0.0;
  double b_coef = 0.0;
  double c_coef = 1.0;
  double d_coef = 0.0;
  double cap_chilled = 1.0;    // kW/K
  double cap_condenser = 1.0;  // kW/K

  void validate() const;
};

struct ChillerSolution {
  double q_evaporator = 0.0;     // kW removed from the chilled water
  double q_condenser = 0.0;      // kW rejected into the condenser water
  double t_chilled_out = 0.0;    // K
  double t_condenser_out = 0.0;  // K
};

struct TowerParams {
  double c8 = -1.0;
  double c9 = 1.0;
  double c10 = 1.0;

  void validate() const;
};

/// Affinity-law gains for a pump bank and the tower fans it serves.
/// `a1`/`a2` describe how extra pumps beyond the running chiller count choke
/// the per-pump flow.
struct PumpFanParams {
  double c11 = 1.0;  // kg/s per Hz (pump)
  double c12 = 1.0;  // kW per Hz^3 (pump)
  double c13 = 1.0;  // kg/s per Hz (fan)
  double c14 = 1.0;  // kW per Hz^3 (fan)
  double a1 = 1.0;
  double a2 = 0.0;

  void validate() const;
  /// Also checks that a1 - a2 * (max_pumps - min_chillers) stays positive.
  void validate_topology(int max_pumps, int min_chillers) const;
};

struct FlowPower {
  double flow = 0.0;   // kg/s
  double power = 0.0;  // kW
};

/// Uniform per-unit operating point returned by the setpoint inverses.
struct UnitSetpoint {
  double freq = 0.0;   // Hz
  double power = 0.0;  // kW per unit
};

// ---------------------------------------------------------------------------
// Chiller
// ---------------------------------------------------------------------------

/// W = (-D q^2 - C q - B q + A) / (D q + C)
double compressor_power(double q_ev, const ChillerParams& params);

/// Heat rejected to the condenser for a given evaporator load when losses are
/// neglected: q_ev + W(q_ev), which simplifies to (A - B q) / (D q + C).
double condenser_heat(double q_ev, const ChillerParams& params);

/// Larger real root of D q^2 + (C + B + D W) q + (C W - A) = 0. Falls back to
/// the exact linear solve when D == 0.
double evaporator_load(double w_comp, const ChillerParams& params);

ChillerSolution solve_chiller(double t_chilled_in, double t_condenser_in, double w_comp,
                              const ChillerParams& params);

// ---------------------------------------------------------------------------
// Cooling tower, pumps, fans
// ---------------------------------------------------------------------------

/// Fraction of the inlet-to-wet-bulb approach removed by the tower, in [0, 1].
double tower_effectiveness(double pump_freq_sum, double fan_freq_sum, const TowerParams& params);

double tower_leaving_temp(double t_in, double t_wet_bulb, double freq_pump, double freq_fan,
                          const TowerParams& params);

double multi_tower_leaving_temp(double t_in, double t_wet_bulb, std::span<const double> pump_freqs,
                                std::span<const double> fan_freqs, const TowerParams& params);

FlowPower pump_flow_power(double freq, const PumpFanParams& params);
FlowPower fan_flow_power(double freq, const PumpFanParams& params);

/// a1 - a2 (n_pumps - n_chillers); throws NonpositiveInteraction when <= 0.
double pump_interaction_factor(int n_pumps, int n_chillers, const PumpFanParams& params);

double multi_pump_flow(std::span<const double> freqs, int n_pumps, int n_chillers,
                       const PumpFanParams& params);

UnitSetpoint inverse_pump_setpoint(double target_flow, int n_pumps, int n_chillers,
                                   const PumpFanParams& params);

/// Uniform fan frequency that brings the tower outlet to `target_t_out`, given
/// `n_pumps` pumps all running at `pump_freq`. Power uses the fan cube law.
UnitSetpoint inverse_fan_setpoint(double target_t_out, double t_in, double t_wet_bulb,
                                  double pump_freq, int n_pumps, int n_fans,
                                  const TowerParams& tower, const PumpFanParams& fans);

// ---------------------------------------------------------------------------
// PID
// ---------------------------------------------------------------------------

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double output_min = 0.0;
  double output_max = 1.0;
  double bias = 0.0;

  void validate() const;
};

/// `integral` holds the accumulated integral contribution (already multiplied
/// by ki), so rescheduling the gains does not bump the output.
struct PidState {
  double integral = 0.0;
  double prev_measurement = 0.0;
  bool primed = false;
};

struct PidResult {
  PidState state;
  double output = 0.0;
};

/// Positional PID on error = setpoint - measurement, derivative taken on the
/// measurement. The integral contribution is clamped to the output range
/// (offset by the bias) and the output is saturated to [output_min, output_max].
PidResult pid_step(const PidState& state, double setpoint, double measurement,
                   const PidGains& gains, double dt);

}  // namespace coolsim
