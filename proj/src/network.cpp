#include "coolsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "coolsim/errors.hpp"
#include "coolsim/units.hpp"

namespace coolsim {

namespace {

constexpr double kTinyFlow = 1e-9;  // kg/s

double node_mass(const Node& n) { return n.volume * units::kWaterDensity; }

int add_node(NetworkTopology& t, std::string id, Loop loop, double volume) {
  t.nodes.push_back({std::move(id), loop, volume});
  return static_cast<int>(t.nodes.size()) - 1;
}

void add_edge(NetworkTopology& t, std::string id, int from, int to, EdgeKind kind, int unit = -1) {
  t.edges.push_back({std::move(id), from, to, kind, unit});
}

double idle_power(const ChillerParams& p) { return compressor_power(0.0, p); }

// Load for a given compressor power, falling back to zero below idle.
double load_for_power(double w, const ChillerParams& p) {
  if (w <= idle_power(p)) return 0.0;
  try {
    return evaporator_load(w, p);
  } catch (const Error&) {
    return 0.0;
  }
}

double power_slope(double q, const ChillerParams& p) {
  const double num = p.a_coef - (p.b_coef + p.c_coef) * q - p.d_coef * q * q;
  const double den = p.d_coef * q + p.c_coef;
  const double dnum = -(p.b_coef + p.c_coef) - 2.0 * p.d_coef * q;
  return (dnum * den - num * p.d_coef) / (den * den);
}

// Largest load whose condenser heat stays at or below q_max.
double head_limited_load(double q_max, const ChillerParams& p) {
  if (condenser_heat(0.0, p) >= q_max) return 0.0;
  const double den = p.b_coef + q_max * p.d_coef;
  if (den >= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, (p.a_coef - q_max * p.c_coef) / den);
}

struct Substep {
  std::vector<double> edge_flow;
  std::vector<double> node_heat;  // kW
  double chilled_in = 0.0, chilled_out = 0.0, condenser_in = 0.0, condenser_out = 0.0;  // kW
};

// Upper bound on flows during a step, used to size substeps.
std::pair<double, double> flow_bounds(const Network& net, const SimState& s,
                                      const PlantControls& c) {
  const auto& cal = net.config.calibration;
  const double factor = pump_interaction_factor(c.chilled_pumps, c.chillers_enabled, cal.chilled_pumps);
  const double max_chw = c.chilled_pumps * net.config.pump_max_freq * factor;
  const double dp_flow = std::sqrt(c.diff_pressure / net.config.hydraulics.distribution_resistance());
  const double chw = std::max(s.chilled_flow, std::min(max_chw, dp_flow));
  const double cw = std::max(s.condenser_flow, c.condenser_flow);
  return {chw, cw};
}

}  // namespace

// ---------------------------------------------------------------------------

int NetworkTopology::node(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  fail(Errc::MissingId, "network has no node '" + id + "'");
}

void NetworkTopology::validate() const {
  const auto n = nodes.size();
  std::vector<int> in(n, 0), out(n, 0);
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (const auto& e : edges) {
    require(e.from >= 0 && e.to >= 0 && static_cast<std::size_t>(e.from) < n &&
                static_cast<std::size_t>(e.to) < n && e.from != e.to,
            Errc::InvalidTopology, "edge '" + e.id + "' does not span a node pair");
    require(nodes[e.from].loop == nodes[e.to].loop, Errc::InvalidTopology,
            "edge '" + e.id + "' crosses between the loops");
    ++out[e.from];
    ++in[e.to];
    fwd[e.from].push_back(e.to);
    rev[e.to].push_back(e.from);
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(in[i] > 0 && out[i] > 0, Errc::InvalidTopology,
            "node '" + nodes[i].id + "' is dangling");
    require(nodes[i].volume > 0.0, Errc::InvalidTopology,
            "node '" + nodes[i].id + "' has no volume");
  }
  // Each loop must be strongly connected.
  auto reach = [&](int start, const std::vector<std::vector<int>>& g) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : g[v])
        if (!seen[w]) seen[w] = 1, stack.push_back(w);
    }
    return seen;
  };
  for (int root : {chw_return, cw_basin}) {
    require(root >= 0, Errc::InvalidTopology, "loop root missing");
    const auto a = reach(root, fwd);
    const auto b = reach(root, rev);
    for (std::size_t i = 0; i < n; ++i) {
      if (nodes[i].loop != nodes[root].loop) continue;
      require(a[i] && b[i], Errc::InvalidTopology,
              "node '" + nodes[i].id + "' is not on a closed loop");
    }
  }
  int evap = 0, cond = 0;
  for (const auto& e : edges) {
    evap += e.kind == EdgeKind::Evaporator;
    cond += e.kind == EdgeKind::Condenser;
  }
  require(evap == chillers && cond == chillers, Errc::InvalidTopology,
          "every chiller needs one evaporator and one condenser branch");
}

double SimState::compressor_power() const {
  double w = 0.0;
  for (const auto& c : chillers) w += c.compressor_power;
  return w;
}

double SimState::total_power() const {
  return compressor_power() + fan_power + chilled_pump_power + condenser_pump_power;
}

std::pair<Network, SimState> build_network(const PlantConfig& config) {
  config.validate();
  Network net{config, {}};
  auto& t = net.topology;
  const auto& v = config.volumes;
  t.chillers = config.chillers;

  t.chw_return = add_node(t, "chw_return", Loop::Chilled, v.chw_return);
  t.chw_hex_out = add_node(t, "chw_hex_out", Loop::Chilled, v.chw_header);
  t.chw_pump_discharge = add_node(t, "chw_pump_discharge", Loop::Chilled, v.chw_header);
  for (int i = 0; i < config.chillers; ++i)
    t.evap_out.push_back(
        add_node(t, "evap_out_" + std::to_string(i + 1), Loop::Chilled, v.chiller_outlet));
  t.chw_bank_leaving = add_node(t, "chw_bank_leaving", Loop::Chilled, v.chw_header);
  t.chw_supply = add_node(t, "chw_supply", Loop::Chilled, v.chw_supply);

  t.cw_basin = add_node(t, "cw_basin", Loop::Condenser, v.cw_basin);
  t.cw_pump_discharge = add_node(t, "cw_pump_discharge", Loop::Condenser, v.cw_header);
  t.cw_hex_out = add_node(t, "cw_hex_out", Loop::Condenser, v.cw_header);
  for (int i = 0; i < config.chillers; ++i)
    t.cond_out.push_back(
        add_node(t, "cond_out_" + std::to_string(i + 1), Loop::Condenser, v.condenser_outlet));
  t.cw_cond_leaving = add_node(t, "cw_cond_leaving", Loop::Condenser, v.cw_header);
  t.cw_tower_in = add_node(t, "cw_tower_in", Loop::Condenser, v.cw_tower_in);

  add_edge(t, "air_handler", t.chw_supply, t.chw_return, EdgeKind::AirHandler);
  add_edge(t, "hex_chilled", t.chw_return, t.chw_hex_out, EdgeKind::HexChilledSide);
  add_edge(t, "chilled_pumps", t.chw_hex_out, t.chw_pump_discharge, EdgeKind::ChilledPump);
  for (int i = 0; i < config.chillers; ++i) {
    add_edge(t, "evaporator_" + std::to_string(i + 1), t.chw_pump_discharge, t.evap_out[i],
             EdgeKind::Evaporator, i);
    add_edge(t, "evap_header_" + std::to_string(i + 1), t.evap_out[i], t.chw_bank_leaving,
             EdgeKind::ChillerHeader, i);
  }
  add_edge(t, "chiller_bypass", t.chw_pump_discharge, t.chw_bank_leaving, EdgeKind::ChillerBypass);
  add_edge(t, "supply_main", t.chw_bank_leaving, t.chw_supply, EdgeKind::SupplyMain);

  add_edge(t, "condenser_pumps", t.cw_basin, t.cw_pump_discharge, EdgeKind::CondenserPump);
  add_edge(t, "hex_condenser", t.cw_pump_discharge, t.cw_hex_out, EdgeKind::HexCondenserSide);
  for (int i = 0; i < config.chillers; ++i) {
    add_edge(t, "condenser_" + std::to_string(i + 1), t.cw_hex_out, t.cond_out[i],
             EdgeKind::Condenser, i);
    add_edge(t, "cond_header_" + std::to_string(i + 1), t.cond_out[i], t.cw_cond_leaving,
             EdgeKind::CondenserHeader, i);
  }
  add_edge(t, "condenser_bypass", t.cw_hex_out, t.cw_cond_leaving, EdgeKind::CondenserBypass);
  add_edge(t, "tower_riser", t.cw_cond_leaving, t.cw_tower_in, EdgeKind::TowerRiser);
  add_edge(t, "towers", t.cw_tower_in, t.cw_basin, EdgeKind::Tower);
  t.validate();

  SimState s;
  s.nodes.resize(t.nodes.size());
  const double t_chw = config.parameter("initial_chw_temp_k");
  const double t_cw = config.parameter("initial_cw_temp_k");
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    s.nodes[i].temperature = t.nodes[i].loop == Loop::Chilled ? t_chw : t_cw;
  s.edge_flows.assign(t.edges.size(), 0.0);
  s.chillers.resize(config.chillers);
  for (std::size_t i = 0; i < s.chillers.size(); ++i) {
    s.chillers[i].leaving_temp = t_chw;
    s.chillers[i].condenser_leaving_temp = t_cw;
  }
  return {net, s};
}

double loop_energy(const Network& net, const SimState& state, Loop loop) {
  double e = 0.0;
  for (std::size_t i = 0; i < state.nodes.size(); ++i) {
    const auto& n = net.topology.nodes[i];
    if (n.loop == loop) e += node_mass(n) * units::kWaterCp * state.nodes[i].temperature;
  }
  return e;
}

double loop_mass(const Network& net, const SimState& state, Loop loop) {
  double m = 0.0;
  for (std::size_t i = 0; i < state.nodes.size(); ++i) {
    const auto& n = net.topology.nodes[i];
    if (n.loop == loop) m += node_mass(n);
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

void check_controls(const Network& net, const PlantControls& c) {
  const auto& cfg = net.config;
  require(c.chillers_enabled >= 0 && c.chillers_enabled <= cfg.chillers, Errc::InvalidArgument,
          "enabled chillers outside the configured range");
  require(c.chilled_pumps >= 1 && c.chilled_pumps <= cfg.chilled_pumps, Errc::InvalidArgument,
          "chilled pump count outside the configured range");
  require(c.condenser_pumps >= 1 && c.condenser_pumps <= cfg.condenser_pumps,
          Errc::InvalidArgument, "condenser pump count outside the configured range");
  require(c.free_cooling_hex >= 1 && c.free_cooling_hex <= cfg.free_cooling_hex,
          Errc::InvalidArgument, "heat exchanger count outside the configured range");
  require(c.condenser_flow > 0.0 && c.diff_pressure > 0.0, Errc::InvalidArgument,
          "flow and pressure setpoints must be positive");
}

// One explicit substep of length h. Mutates s in place.
void substep(const Network& net, SimState& s, const PlantControls& c, const Boundary& b,
             double h) {
  const auto& cfg = net.config;
  const auto& cal = cfg.calibration;
  const auto& topo = net.topology;
  constexpr double cp = units::kWaterCp;

  Substep sub;
  sub.edge_flow.assign(topo.edges.size(), 0.0);
  sub.node_heat.assign(topo.nodes.size(), 0.0);
  auto temp = [&](int node) { return s.nodes[node].temperature; };

  // Staging ramps.
  const double rate = h / cfg.step_seconds;
  double ramp_sum = 0.0;
  for (int i = 0; i < topo.chillers; ++i) {
    auto& ch = s.chillers[i];
    const bool on = i < c.chillers_enabled;
    if (on && !ch.enabled) {
      ch.pid = PidState{};
      ch.pid.integral = idle_power(cal.chiller);
      ch.compressor_power = idle_power(cal.chiller);
    }
    ch.enabled = on;
    const double target = on ? 1.0 : 0.0;
    ch.ramp = ch.ramp < target ? std::min(target, ch.ramp + rate) : std::max(target, ch.ramp - rate);
    ramp_sum += ch.ramp;
  }
  const double share_norm = std::max(1.0, ramp_sum);

  // Chilled pumps: PID on the square root of the distribution differential
  // pressure, which is linear in pump frequency.
  {
    const auto& pp = cal.chilled_pumps;
    const double factor = pump_interaction_factor(c.chilled_pumps, c.chillers_enabled, pp);
    const double r_dist = cfg.hydraulics.distribution_resistance();
    const double k = std::sqrt(r_dist / units::kPaPerPsi);
    const double slope = k * c.chilled_pumps * factor;
    const double measured = k * s.chilled_flow;
    const double target = std::sqrt(units::pa_to_psi(c.diff_pressure));
    PidGains g{cfg.chilled_pump_pid.kp / slope, cfg.chilled_pump_pid.ki / slope,
               cfg.chilled_pump_pid.kd / slope, 0.0, cfg.pump_max_freq, 0.0};
    const auto r = pid_step(s.chilled_pump_pid, target, measured, g, h);
    s.chilled_pump_pid = r.state;
    s.chilled_pump_freq = r.output;
    s.chilled_flow = s.chilled_pump_freq * c.chilled_pumps * factor;
    s.chilled_pump_power = c.chilled_pumps * pump_flow_power(s.chilled_pump_freq, pp).power;
    s.diff_pressure = r_dist * s.chilled_flow * s.chilled_flow;
  }

  // Condenser pumps follow the flow setpoint through the inverse model.
  {
    const auto& pp = cal.condenser_pumps;
    const auto sp = inverse_pump_setpoint(c.condenser_flow, c.condenser_pumps, c.chillers_enabled, pp);
    s.condenser_pump_freq = std::min(sp.freq, cfg.pump_max_freq);
    s.condenser_flow =
        s.condenser_pump_freq * c.condenser_pumps *
        pump_interaction_factor(c.condenser_pumps, c.chillers_enabled, pp);
    s.condenser_pump_power = c.condenser_pumps * pump_flow_power(s.condenser_pump_freq, pp).power;
  }

  const double m_chw = s.chilled_flow;
  const double m_cw = s.condenser_flow;

  // Branch flows.
  double chw_branches = 0.0, cw_branches = 0.0;
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const auto& edge = topo.edges[e];
    switch (edge.kind) {
      case EdgeKind::Evaporator:
      case EdgeKind::ChillerHeader:
        sub.edge_flow[e] = m_chw * s.chillers[edge.unit].ramp / share_norm;
        if (edge.kind == EdgeKind::Evaporator) chw_branches += sub.edge_flow[e];
        break;
      case EdgeKind::Condenser:
      case EdgeKind::CondenserHeader:
        sub.edge_flow[e] = m_cw * s.chillers[edge.unit].ramp / share_norm;
        if (edge.kind == EdgeKind::Condenser) cw_branches += sub.edge_flow[e];
        break;
      case EdgeKind::CondenserPump:
      case EdgeKind::HexCondenserSide:
      case EdgeKind::TowerRiser:
      case EdgeKind::Tower:
        sub.edge_flow[e] = m_cw;
        break;
      case EdgeKind::ChillerBypass:
      case EdgeKind::CondenserBypass:
        break;
      default:
        sub.edge_flow[e] = m_chw;
    }
  }
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    if (topo.edges[e].kind == EdgeKind::ChillerBypass)
      sub.edge_flow[e] = std::max(0.0, m_chw - chw_branches);
    if (topo.edges[e].kind == EdgeKind::CondenserBypass)
      sub.edge_flow[e] = std::max(0.0, m_cw - cw_branches);
  }

  // Free-cooling heat exchangers between chilled return and condenser supply.
  {
    const double eff = 1.0 - std::pow(1.0 - cfg.hex_effectiveness, c.free_cooling_hex);
    const double c_min = std::min(m_chw, m_cw) * cp;
    const double q = eff * c_min * std::max(0.0, temp(topo.chw_return) - temp(topo.cw_pump_discharge));
    s.hex_heat = q;
    sub.node_heat[topo.chw_hex_out] -= q;
    sub.node_heat[topo.cw_hex_out] += q;
    sub.chilled_out += q;
    sub.condenser_in += q;
  }

  // Chillers.
  const double t_chi = temp(topo.chw_pump_discharge);
  const double t_ci = temp(topo.cw_hex_out);
  for (int i = 0; i < topo.chillers; ++i) {
    auto& ch = s.chillers[i];
    ch.chilled_flow = m_chw * ch.ramp / share_norm;
    ch.condenser_flow = m_cw * ch.ramp / share_norm;
    ch.q_evaporator = 0.0;
    ch.q_condenser = 0.0;
    if (!ch.enabled) {
      ch.compressor_power = 0.0;
      ch.pid = PidState{};
      ch.leaving_temp = t_chi;
      ch.condenser_leaving_temp = t_ci;
      continue;
    }
    ChillerParams p = cal.chiller;
    const double w_idle = idle_power(p);
    double w = std::max(ch.compressor_power, w_idle);
    double q = 0.0;
    if (ch.chilled_flow > kTinyFlow && ch.condenser_flow > kTinyFlow) {
      p.cap_chilled = ch.chilled_flow * cp;
      p.cap_condenser = ch.condenser_flow * cp;
      // Compressor loop: gains scheduled on the local plant gain so the
      // normalized tuning holds across loads and flows.
      const double q_prev = load_for_power(w, p);
      const double measured = t_chi - q_prev / p.cap_chilled;
      const double dwdq = std::max(power_slope(q_prev, p), 1e-6);
      const double scale = -p.cap_chilled * dwdq;
      PidGains g{cfg.chiller_pid.kp * scale, cfg.chiller_pid.ki * scale, cfg.chiller_pid.kd * scale,
                 w_idle, cfg.chiller_max_power, 0.0};
      auto r = pid_step(ch.pid, c.chiller_leaving_temp, measured, g, h);
      w = r.output;
      q = load_for_power(w, p);

      // Freeze protection and high head unloading.
      const double q_freeze = std::max(0.0, p.cap_chilled * (t_chi - cfg.chiller_min_leaving_temp));
      const double q_head =
          head_limited_load(p.cap_condenser * (cfg.condenser_max_leaving_temp - t_ci), p);
      const double q_lim = std::min(q_freeze, q_head);
      if (q > q_lim) {
        q = q_lim;
        w = compressor_power(q, p);
        const double error = c.chiller_leaving_temp - measured;
        r.state.integral = std::clamp(w - g.kp * error, w_idle, cfg.chiller_max_power);
      }
      ch.pid = r.state;
      ch.q_evaporator = q;
      ch.leaving_temp = t_chi - q / p.cap_chilled;
      ch.q_condenser = q + w;
      ch.condenser_leaving_temp = t_ci + ch.q_condenser / p.cap_condenser;
    } else {
      // Enabled but its branch is still opening: idles, heat goes to the
      // stagnant condenser volume.
      w = w_idle;
      ch.q_condenser = w;
      ch.leaving_temp = t_chi;
      ch.condenser_leaving_temp = temp(topo.cond_out[i]);
    }
    ch.compressor_power = w;
    sub.node_heat[topo.evap_out[i]] -= ch.q_evaporator;
    sub.node_heat[topo.cond_out[i]] += ch.q_condenser;
    sub.chilled_out += ch.q_evaporator;
    sub.condenser_in += ch.q_condenser;
  }

  // Cooling towers. Fans follow the return temperature setpoint through the
  // inverse model; they idle when no useful cooling is possible.
  {
    const double t_in = temp(topo.cw_tower_in);
    const double t_wb = b.weather.t_wet_bulb;
    const double pump_sum = s.condenser_pump_freq * c.condenser_pumps;
    double fan = 0.0;
    if (t_in > t_wb && pump_sum > 0.0 && c.tower_return_temp < t_in) {
      if (c.tower_return_temp <= t_wb) {
        fan = cfg.fan_max_freq;
      } else {
        fan = inverse_fan_setpoint(c.tower_return_temp, t_in, t_wb, s.condenser_pump_freq,
                                   c.condenser_pumps, cfg.towers, cal.tower, cal.condenser_pumps)
                  .freq;
      }
    }
    s.fan_freq = std::clamp(fan, 0.0, cfg.fan_max_freq);
    s.fan_power = cfg.towers * fan_flow_power(s.fan_freq, cal.condenser_pumps).power;
    const double eff = tower_effectiveness(pump_sum, s.fan_freq * cfg.towers, cal.tower);
    const double t_out = t_in - (t_in - t_wb) * eff;
    s.tower_heat = m_cw * cp * (t_in - t_out);
    sub.node_heat[topo.cw_basin] -= s.tower_heat;
    if (s.tower_heat >= 0.0) {
      sub.condenser_out += s.tower_heat;
    } else {
      sub.condenser_in -= s.tower_heat;
    }
  }

  // Building load and ambient gain on the distribution main.
  {
    sub.node_heat[topo.chw_return] += b.building_load;
    sub.chilled_in += b.building_load;
    const double gain = b.pipe_heat_gain * (b.weather.t_dry_bulb - temp(topo.chw_supply));
    sub.node_heat[topo.chw_supply] += gain;
    if (gain >= 0.0) {
      sub.chilled_in += gain;
    } else {
      sub.chilled_out -= gain;
    }
  }

  // Well-mixed upwind energy balance, explicit in time.
  std::vector<double> inflow(topo.nodes.size(), 0.0);
  std::vector<double> rate_of_heat(sub.node_heat);
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const auto& edge = topo.edges[e];
    const double m = sub.edge_flow[e];
    inflow[edge.to] += m;
    rate_of_heat[edge.to] += m * cp * (temp(edge.from) - temp(edge.to));
  }
  for (std::size_t n = 0; n < topo.nodes.size(); ++n) {
    auto& ns = s.nodes[n];
    ns.temperature += h * rate_of_heat[n] / (node_mass(topo.nodes[n]) * cp);
    ns.mass_flow = inflow[n];
    if (!(ns.temperature >= kMinNodeTemp && ns.temperature <= kMaxNodeTemp)) {
      std::ostringstream msg;
      msg << "node '" << topo.nodes[n].id << "' reached " << ns.temperature
          << " K at t = " << s.clock << " s";
      fail(Errc::Instability, msg.str());
    }
  }

  // Pressure probes along the chilled loop.
  const double m2 = m_chw * m_chw;
  const double r_sup = cfg.hydraulics.supply_main.resistance();
  const double r_dist = cfg.hydraulics.distribution_resistance();
  for (std::size_t n = 0; n < topo.nodes.size(); ++n) s.nodes[n].diff_pressure = 0.0;
  s.nodes[topo.chw_return].diff_pressure = cfg.hydraulics.return_main.resistance() * m2;
  s.nodes[topo.chw_pump_discharge].diff_pressure = (r_sup + r_dist) * m2;
  for (int i : topo.evap_out) s.nodes[i].diff_pressure = (0.5 * r_sup + r_dist) * m2;
  s.nodes[topo.chw_bank_leaving].diff_pressure = (0.5 * r_sup + r_dist) * m2;
  s.nodes[topo.chw_supply].diff_pressure = r_dist * m2;

  s.edge_flows = sub.edge_flow;
  s.chilled_energy.heat_in += sub.chilled_in * h;
  s.chilled_energy.heat_out += sub.chilled_out * h;
  s.condenser_energy.heat_in += sub.condenser_in * h;
  s.condenser_energy.heat_out += sub.condenser_out * h;
  s.clock += h;
}

}  // namespace

SimState advance(const Network& net, const SimState& state, const PlantControls& controls,
                 const Boundary& boundary, double dt) {
  require(dt > 0.0, Errc::InvalidArgument, "advance: dt must be positive");
  check_controls(net, controls);
  boundary.weather.validate();
  require(boundary.building_load >= 0.0, Errc::InvalidArgument, "building load must be nonnegative");

  const auto& topo = net.topology;
  const auto [chw_bound, cw_bound] = flow_bounds(net, state, controls);
  double residence = std::numeric_limits<double>::infinity();
  for (const auto& n : topo.nodes) {
    const double m = n.loop == Loop::Chilled ? chw_bound : cw_bound;
    if (m > 0.0) residence = std::min(residence, node_mass(n) / m);
  }
  const double h_max = std::min(net.config.max_substep_seconds, 0.5 * residence);
  const int k = std::max(1, static_cast<int>(std::ceil(dt / h_max - 1e-9)));
  const double h = dt / k;

  SimState s = state;
  s.chilled_energy = {};
  s.condenser_energy = {};
  const double e_chw = loop_energy(net, state, Loop::Chilled);
  const double e_cw = loop_energy(net, state, Loop::Condenser);
  const double clock0 = state.clock;
  for (int i = 0; i < k; ++i) substep(net, s, controls, boundary, h);
  s.clock = clock0 + dt;
  s.last_substeps = k;
  s.chilled_energy.storage = loop_energy(net, s, Loop::Chilled) - e_chw;
  s.condenser_energy.storage = loop_energy(net, s, Loop::Condenser) - e_cw;
  return s;
}

SteadyResult solve_steady(const Network& net, const SimState& state, const PlantControls& controls,
                          const Boundary& boundary, int max_iterations, double tolerance) {
  SteadyResult r;
  r.state = state;
  for (int it = 1; it <= max_iterations; ++it) {
    SimState next = advance(net, r.state, controls, boundary, net.config.step_seconds);
    double change = 0.0;
    for (std::size_t n = 0; n < next.nodes.size(); ++n)
      change = std::max(change, std::abs(next.nodes[n].temperature - r.state.nodes[n].temperature));
    r.state = std::move(next);
    r.iterations = it;
    r.last_change = change;
    if (change < tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace coolsim
