#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coolsim/errors.hpp"
#include "coolsim/facility.hpp"
#include "coolsim/network.hpp"
#include "coolsim/units.hpp"

using namespace coolsim;

namespace {

Boundary default_boundary(const PlantConfig& cfg) { return boundary_at(cfg, 0.0); }

// Inflow minus outflow at every node from the recorded edge flows.
double worst_flow_imbalance(const Network& net, const SimState& s) {
  std::vector<double> net_flow(net.topology.nodes.size(), 0.0);
  for (std::size_t e = 0; e < net.topology.edges.size(); ++e) {
    net_flow[net.topology.edges[e].to] += s.edge_flows[e];
    net_flow[net.topology.edges[e].from] -= s.edge_flows[e];
  }
  double worst = 0.0;
  for (double f : net_flow) worst = std::max(worst, std::abs(f));
  return worst;
}

}  // namespace

TEST(Topology, DefaultPlantValidates) {
  auto [net, s] = build_network(default_plant_config());
  EXPECT_EQ(net.topology.chillers, 3);
  EXPECT_EQ(net.topology.evap_out.size(), 3u);
  EXPECT_EQ(s.nodes.size(), net.topology.nodes.size());
  EXPECT_NO_THROW(net.topology.validate());
}

TEST(Topology, DanglingNodeRejected) {
  auto [net, s] = build_network(default_plant_config());
  net.topology.nodes.push_back({"orphan", Loop::Chilled, 1.0});
  try {
    net.topology.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidTopology);
  }
}

TEST(Topology, CrossLoopEdgeRejected) {
  auto [net, s] = build_network(default_plant_config());
  net.topology.edges.push_back({"leak", net.topology.chw_supply, net.topology.cw_basin, EdgeKind::SupplyMain, -1});
  EXPECT_THROW(net.topology.validate(), Error);
}

TEST(Advance, FlowsBalanceAtEveryNode) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  PlantControls c;
  c.chillers_enabled = 2;
  for (int i = 0; i < 5; ++i) {
    s = advance(net, s, c, default_boundary(cfg), 300.0);
    EXPECT_LT(worst_flow_imbalance(net, s), 1e-9);
  }
}

TEST(Advance, EnergyResidualIsRoundoff) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  PlantControls c;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> nch(0, 3);
  for (int i = 0; i < 40; ++i) {
    c.chillers_enabled = nch(rng);
    s = advance(net, s, c, default_boundary(cfg), 300.0);
    for (const auto* e : {&s.chilled_energy, &s.condenser_energy}) {
      const double gross = e->heat_in + e->heat_out + std::abs(e->storage);
      EXPECT_LT(std::abs(e->residual()), 1e-9 * gross + 1e-9);
    }
  }
}

TEST(Advance, DeterministicForIdenticalInputs) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s0] = build_network(cfg);
  PlantControls c;
  c.chillers_enabled = 2;
  SimState a = s0, b = s0;
  for (int i = 0; i < 6; ++i) {
    a = advance(net, a, c, default_boundary(cfg), 300.0);
    b = advance(net, b, c, default_boundary(cfg), 300.0);
  }
  for (std::size_t n = 0; n < a.nodes.size(); ++n) EXPECT_EQ(a.nodes[n].temperature, b.nodes[n].temperature);
  EXPECT_EQ(a.total_power(), b.total_power());
}

TEST(Advance, IdlePlantAtUniformTemperatureStaysPut) {
  // No load, no ambient gain, chillers off, tower at the wet bulb and the
  // heat exchanger without a temperature difference: nothing may move.
  PlantConfig cfg = default_plant_config();
  cfg.parameters["load_base_kw"] = 0.0;
  cfg.parameters["load_gain_kw_per_k"] = 0.0;
  cfg.parameters["pipe_heat_gain_kw_per_k"] = 0.0;
  auto [net, s] = build_network(cfg);
  Boundary b = boundary_at(cfg, 0.0);
  for (auto& n : s.nodes) n.temperature = b.weather.t_wet_bulb;
  PlantControls c;
  c.chillers_enabled = 0;
  const SimState next = advance(net, s, c, b, 600.0);
  for (std::size_t n = 0; n < s.nodes.size(); ++n)
    EXPECT_NEAR(next.nodes[n].temperature, b.weather.t_wet_bulb, 1e-12) << net.topology.nodes[n].id;
  EXPECT_EQ(next.compressor_power(), 0.0);
  EXPECT_EQ(next.hex_heat, 0.0);
}

TEST(Advance, NegativeLoadRejected) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  Boundary b = default_boundary(cfg);
  b.building_load = -1.0;
  EXPECT_THROW(advance(net, s, PlantControls{}, b, 300.0), Error);
}

TEST(Advance, ControlsOutsideEquipmentRejected) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  PlantControls c;
  c.chillers_enabled = 4;
  EXPECT_THROW(advance(net, s, c, default_boundary(cfg), 300.0), Error);
}

TEST(Advance, RunawayTemperatureIsInstability) {
  PlantConfig cfg = default_plant_config();
  cfg.parameters["load_base_kw"] = 6000.0;
  cfg.parameters["pipe_heat_gain_kw_per_k"] = 0.0;
  cfg.free_cooling_hex = 1;
  cfg.hex_effectiveness = 1e-9;
  auto [net, s] = build_network(cfg);
  PlantControls c;
  c.chillers_enabled = 0;
  try {
    for (int i = 0; i < 2000; ++i) s = advance(net, s, c, default_boundary(cfg), 300.0);
    FAIL() << "no instability raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Instability);
  }
}

TEST(Steady, IndependentOfInitialTemperatures) {
  PlantConfig a = default_plant_config();
  PlantConfig b = a;
  b.parameters["initial_chw_temp_k"] = 300.0;
  b.parameters["initial_cw_temp_k"] = 280.0;
  PlantControls c;
  auto [na, sa] = build_network(a);
  auto [nb, sb] = build_network(b);
  const auto ra = solve_steady(na, sa, c, default_boundary(a), 5000, 1e-7);
  const auto rb = solve_steady(nb, sb, c, default_boundary(b), 5000, 1e-7);
  ASSERT_TRUE(ra.converged);
  ASSERT_TRUE(rb.converged);
  // Branches of disabled chillers are stagnant and keep whatever they held.
  for (std::size_t n = 0; n < ra.state.nodes.size(); ++n) {
    if (ra.state.nodes[n].mass_flow <= 0.0) continue;
    EXPECT_NEAR(ra.state.nodes[n].temperature, rb.state.nodes[n].temperature, 1e-3) << na.topology.nodes[n].id;
  }
}

TEST(Steady, MoreLoadNeedsMoreCompressorPower) {
  PlantControls c;
  double previous = -1.0;
  for (double load : {300.0, 600.0, 900.0, 1200.0}) {
    PlantConfig cfg = default_plant_config();
    cfg.parameters["load_base_kw"] = load;
    auto [net, s] = build_network(cfg);
    const auto r = solve_steady(net, s, c, default_boundary(cfg));
    ASSERT_TRUE(r.converged);
    EXPECT_GT(r.state.compressor_power(), previous);
    previous = r.state.compressor_power();
  }
}

TEST(Steady, BankLeavingTemperatureSettlesOnSetpoint) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  PlantControls c;
  c.chiller_leaving_temp = units::fahrenheit_to_kelvin(44.0);
  const auto r = solve_steady(net, s, c, default_boundary(cfg));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.state.nodes[net.topology.chw_bank_leaving].temperature, c.chiller_leaving_temp, 0.05);
}

TEST(Steady, SetpointTrackingErrorShrinks) {
  // After the first step the leaving-temperature error falls step by step
  // until it is inside half a degree F.
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  PlantControls c;
  s = solve_steady(net, s, c, default_boundary(cfg)).state;
  for (double sp_f : {42.0, 52.0}) {
    PlantControls moved = c;
    moved.chiller_leaving_temp = units::fahrenheit_to_kelvin(sp_f);
    SimState x = advance(net, s, moved, default_boundary(cfg), 300.0);
    auto err = [&](const SimState& st) {
      return std::abs(units::kelvin_to_fahrenheit(st.nodes[net.topology.chw_bank_leaving].temperature) - sp_f);
    };
    double previous = err(x);
    int steps = 0;
    while (previous > 0.5 && steps < 50) {
      x = advance(net, x, moved, default_boundary(cfg), 300.0);
      EXPECT_LT(err(x), previous) << "setpoint " << sp_f << " step " << steps;
      previous = err(x);
      ++steps;
    }
    EXPECT_LE(previous, 0.5);
  }
}

TEST(Steady, MassPerLoopIsFixedByVolumes) {
  const PlantConfig cfg = default_plant_config();
  auto [net, s] = build_network(cfg);
  const double m0 = loop_mass(net, s, Loop::Chilled) + loop_mass(net, s, Loop::Condenser);
  s = advance(net, s, PlantControls{}, default_boundary(cfg), 300.0);
  EXPECT_EQ(loop_mass(net, s, Loop::Chilled) + loop_mass(net, s, Loop::Condenser), m0);
}
