#include "coolsim/components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "coolsim/errors.hpp"

namespace coolsim {

namespace {

double sum(std::span<const double> values) { return std::accumulate(values.begin(), values.end(), 0.0); }

}  // namespace

void ChillerParams::validate() const {
  require(std::isfinite(a_coef) && std::isfinite(b_coef) && std::isfinite(c_coef) &&
              std::isfinite(d_coef),
          Errc::InvalidArgument, "chiller coefficients must be finite");
  require(cap_chilled > 0.0, Errc::InvalidArgument, "chiller: cap_chilled must be positive");
  require(cap_condenser > 0.0, Errc::InvalidArgument, "chiller: cap_condenser must be positive");
  require(c_coef != 0.0, Errc::InvalidArgument, "chiller: c_coef must be nonzero");
}

void TowerParams::validate() const {
  require(c8 < 0.0, Errc::InvalidArgument, "tower: c8 must be negative");
  require(c9 > 0.0, Errc::InvalidArgument, "tower: c9 must be positive");
  require(c10 > 0.0, Errc::InvalidArgument, "tower: c10 must be positive");
}

void PumpFanParams::validate() const {
  require(c11 > 0.0 && c12 > 0.0 && c13 > 0.0 && c14 > 0.0, Errc::InvalidArgument,
          "pump/fan: c11..c14 must be positive");
  require(a1 > 0.0, Errc::InvalidArgument, "pump/fan: a1 must be positive");
  require(a2 >= 0.0, Errc::InvalidArgument, "pump/fan: a2 must be nonnegative");
}

void PumpFanParams::validate_topology(int max_pumps, int min_chillers) const {
  validate();
  require(a1 - a2 * (max_pumps - min_chillers) > 0.0, Errc::NonpositiveInteraction,
          "pump/fan: a1 - a2 * (" + std::to_string(max_pumps) + " - " +
              std::to_string(min_chillers) + ") must stay positive");
}

// ---------------------------------------------------------------------------

double compressor_power(double q_ev, const ChillerParams& p) {
  const double denom = p.d_coef * q_ev + p.c_coef;
  const double scale = std::max({1.0, std::abs(p.c_coef), std::abs(p.d_coef * q_ev)});
  require(std::abs(denom) >= 1e-12 * scale, Errc::SingularDenominator,
          "compressor_power: D*q + C vanishes");
  return (-p.d_coef * q_ev * q_ev - p.c_coef * q_ev - p.b_coef * q_ev + p.a_coef) / denom;
}

double condenser_heat(double q_ev, const ChillerParams& p) {
  return q_ev + compressor_power(q_ev, p);
}

double evaporator_load(double w_comp, const ChillerParams& p) {
  const double a = p.d_coef;
  const double b = p.c_coef + p.b_coef + p.d_coef * w_comp;
  const double c = p.c_coef * w_comp - p.a_coef;

  double q = 0.0;
  if (a == 0.0) {
    require(b != 0.0, Errc::SingularDenominator, "evaporator_load: C + B vanishes with D = 0");
    q = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    require(disc >= 0.0, Errc::NoRealRoot,
            "evaporator_load: negative discriminant, operating point infeasible");
    const double root = std::sqrt(disc);
    // Cancellation-free pair of roots.
    const double t = -0.5 * (b + std::copysign(root, b));
    if (t == 0.0) {
      q = 0.0;
    } else {
      q = std::max(t / a, c / t);
    }
  }
  require(q >= 0.0, Errc::NegativeLoad,
          "evaporator_load: positive-branch root is negative (W below idle power)");
  return q;
}

ChillerSolution solve_chiller(double t_chilled_in, double t_condenser_in, double w_comp,
                              const ChillerParams& params) {
  params.validate();
  require(w_comp >= 0.0, Errc::InvalidArgument, "solve_chiller: w_comp must be nonnegative");
  ChillerSolution s;
  s.q_evaporator = evaporator_load(w_comp, params);
  s.q_condenser = s.q_evaporator + w_comp;
  s.t_chilled_out = t_chilled_in - s.q_evaporator / params.cap_chilled;
  s.t_condenser_out = t_condenser_in + s.q_condenser / params.cap_condenser;
  return s;
}

// ---------------------------------------------------------------------------

double tower_effectiveness(double pump_freq_sum, double fan_freq_sum, const TowerParams& p) {
  require(pump_freq_sum >= 0.0 && fan_freq_sum >= 0.0, Errc::InvalidArgument,
          "tower: frequencies must be nonnegative");
  const double exponent = p.c8 * std::pow(pump_freq_sum, p.c9) * std::pow(fan_freq_sum, p.c10);
  return -std::expm1(exponent);
}

namespace {

double tower_outlet(double t_in, double t_wb, double pump_sum, double fan_sum,
                    const TowerParams& p) {
  p.validate();
  require(t_in > t_wb, Errc::Domain, "tower: inlet water must be warmer than the wet bulb");
  const double eff = tower_effectiveness(pump_sum, fan_sum, p);
  return std::clamp(t_in - (t_in - t_wb) * eff, t_wb, t_in);
}

}  // namespace

double tower_leaving_temp(double t_in, double t_wet_bulb, double freq_pump, double freq_fan,
                          const TowerParams& params) {
  return tower_outlet(t_in, t_wet_bulb, freq_pump, freq_fan, params);
}

double multi_tower_leaving_temp(double t_in, double t_wet_bulb, std::span<const double> pump_freqs,
                                std::span<const double> fan_freqs, const TowerParams& params) {
  return tower_outlet(t_in, t_wet_bulb, sum(pump_freqs), sum(fan_freqs), params);
}

FlowPower pump_flow_power(double freq, const PumpFanParams& p) {
  require(freq >= 0.0, Errc::InvalidArgument, "pump: frequency must be nonnegative");
  return {p.c11 * freq, p.c12 * freq * freq * freq};
}

FlowPower fan_flow_power(double freq, const PumpFanParams& p) {
  require(freq >= 0.0, Errc::InvalidArgument, "fan: frequency must be nonnegative");
  return {p.c13 * freq, p.c14 * freq * freq * freq};
}

double pump_interaction_factor(int n_pumps, int n_chillers, const PumpFanParams& p) {
  const double factor = p.a1 - p.a2 * (n_pumps - n_chillers);
  require(factor > 0.0, Errc::NonpositiveInteraction,
          "pump bank: a1 - a2 * (n_pumps - n_chillers) must be positive");
  return factor;
}

double multi_pump_flow(std::span<const double> freqs, int n_pumps, int n_chillers,
                       const PumpFanParams& params) {
  require(static_cast<int>(freqs.size()) == n_pumps, Errc::InvalidArgument,
          "multi_pump_flow: one frequency per pump required");
  return sum(freqs) * pump_interaction_factor(n_pumps, n_chillers, params);
}

UnitSetpoint inverse_pump_setpoint(double target_flow, int n_pumps, int n_chillers,
                                   const PumpFanParams& params) {
  require(target_flow >= 0.0, Errc::InvalidArgument, "inverse_pump_setpoint: negative flow");
  require(n_pumps > 0, Errc::InvalidArgument, "inverse_pump_setpoint: need at least one pump");
  const double factor = pump_interaction_factor(n_pumps, n_chillers, params);
  const double freq = target_flow / (params.c11 * n_pumps * factor);
  return {freq, params.c12 * freq * freq * freq};
}

UnitSetpoint inverse_fan_setpoint(double target_t_out, double t_in, double t_wet_bulb,
                                  double pump_freq, int n_pumps, int n_fans,
                                  const TowerParams& tower, const PumpFanParams& fans) {
  tower.validate();
  require(pump_freq > 0.0 && n_pumps > 0, Errc::InvalidArgument,
          "inverse_fan_setpoint: pumps must be running");
  require(n_fans > 0, Errc::InvalidArgument, "inverse_fan_setpoint: need at least one fan");
  require(t_in > t_wet_bulb, Errc::Domain, "inverse_fan_setpoint: inlet at or below wet bulb");
  require(target_t_out <= t_in, Errc::Domain, "inverse_fan_setpoint: target above inlet");
  const double log_arg = 1.0 + (target_t_out - t_in) / (t_in - t_wet_bulb);
  require(log_arg > 0.0, Errc::Domain,
          "inverse_fan_setpoint: target at or below wet bulb is unreachable");
  const double ratio =
      std::log(log_arg) / (tower.c8 * std::pow(n_pumps * pump_freq, tower.c9));
  const double freq = std::pow(std::max(ratio, 0.0), 1.0 / tower.c10) / n_fans;
  return {freq, fans.c14 * freq * freq * freq};
}

// ---------------------------------------------------------------------------

void PidGains::validate() const {
  require(output_min < output_max, Errc::InvalidArgument, "pid: output_min must be < output_max");
  require(std::isfinite(kp) && std::isfinite(ki) && std::isfinite(kd), Errc::InvalidArgument,
          "pid: gains must be finite");
}

PidResult pid_step(const PidState& state, double setpoint, double measurement,
                   const PidGains& gains, double dt) {
  require(dt > 0.0, Errc::InvalidArgument, "pid_step: dt must be positive");
  const double error = setpoint - measurement;

  PidResult r;
  r.state.integral = std::clamp(state.integral + gains.ki * error * dt,
                                gains.output_min - gains.bias, gains.output_max - gains.bias);
  const double derivative =
      state.primed ? -gains.kd * (measurement - state.prev_measurement) / dt : 0.0;
  r.state.prev_measurement = measurement;
  r.state.primed = true;

  const double raw = gains.bias + gains.kp * error + r.state.integral + derivative;
  r.output = std::clamp(raw, gains.output_min, gains.output_max);
  return r;
}

}  // namespace coolsim
