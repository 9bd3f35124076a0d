#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "coolsim/calibration.hpp"
#include "coolsim/components.hpp"
#include "coolsim/errors.hpp"

using namespace coolsim;

namespace {

DelimitedTable make_table(std::vector<std::string> names) {
  DelimitedTable t;
  for (auto& n : names) t.columns.push_back({n, ""});
  return t;
}

void add_row(DelimitedTable& t, std::vector<double> row) {
  t.rows.push_back(std::move(row));
  t.line_numbers.push_back(static_cast<int>(t.rows.size()) + 1);
}

double noisy(double v, double rel, std::mt19937_64& rng) {
  if (rel == 0.0) return v;
  std::normal_distribution<double> n(0.0, rel);
  return v * (1.0 + n(rng));
}

DelimitedTable pump_power_table(double c12, double rel, std::mt19937_64& rng) {
  auto t = make_table({"pump_freq_hz", "pump_power_kw"});
  for (int i = 0; i < 60; ++i) {
    const double f = 10.0 + i * 0.8;
    add_row(t, {f, noisy(c12 * f * f * f, rel, rng)});
  }
  return t;
}

DelimitedTable tower_table(const TowerParams& p, double rel, std::mt19937_64& rng) {
  auto t = make_table(
      {"tower_inlet_temp_k", "wet_bulb_k", "pump_freq_sum_hz", "fan_freq_sum_hz", "tower_outlet_temp_k"});
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 600; ++i) {
    const double wb = 285 + 8 * u(rng);
    const double tin = wb + 4 + 8 * u(rng);
    const double pf = 5 + 145 * u(rng), ff = 5 + 175 * u(rng);
    const double out = tower_leaving_temp(tin, wb, pf, ff, p);
    // noise on the approach removed, keeps the outlet inside [wb, tin]
    const double removed = noisy(tin - out, rel, rng);
    add_row(t, {tin, wb, pf, ff, tin - removed});
  }
  return t;
}

ChillerParams plant_chiller() {
  ChillerParams p;
  p.a_coef = 30;
  p.b_coef = -1.12;
  p.c_coef = 1;
  p.d_coef = -6e-5;
  return p;
}

DelimitedTable chiller_table(const ChillerParams& p, double rel, std::mt19937_64& rng) {
  auto t = make_table({"chiller_load_kw", "compressor_power_kw"});
  for (int i = 0; i < 50; ++i) {
    const double q = 50.0 + i * 45.0;
    add_row(t, {q, noisy(compressor_power(q, p), rel, rng)});
  }
  return t;
}

}  // namespace

TEST(Calibration, ModelIds) {
  for (auto m : {CalibrationModel::PumpPower, CalibrationModel::FanPower, CalibrationModel::PumpFlow,
                 CalibrationModel::FanFlow, CalibrationModel::MultiPumpFlow, CalibrationModel::Tower,
                 CalibrationModel::Chiller}) {
    EXPECT_EQ(parse_calibration_model(to_string(m)), m);
  }
  EXPECT_THROW(parse_calibration_model("boiler"), Error);
}

TEST(Calibration, NoiselessCubeLaw) {
  std::mt19937_64 rng(1);
  const auto r = calibrate(CalibrationModel::PumpPower, pump_power_table(0.4, 0.0, rng));
  EXPECT_NEAR(r.params.at("c12"), 0.4, 1e-8);
  EXPECT_LT(r.rmse, 1e-9 * r.mean_output);
}

TEST(Calibration, NoisyCubeLawWithinFivePercent) {
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto r = calibrate(CalibrationModel::PumpPower, pump_power_table(0.4, 0.01, rng));
    EXPECT_NEAR(r.params.at("c12"), 0.4, 0.05 * 0.4);
  }
}

TEST(Calibration, ProportionalFlow) {
  auto t = make_table({"fan_freq_hz", "fan_airflow_kgs"});
  for (int i = 1; i <= 10; ++i) add_row(t, {i * 3.0, 2.25 * i * 3.0});
  EXPECT_NEAR(calibrate(CalibrationModel::FanFlow, t).params.at("c13"), 2.25, 1e-12);
}

TEST(Calibration, MultiPumpFlow) {
  auto t = make_table({"pump_freq_sum_hz", "n_pumps", "n_chillers", "condenser_flow_kgs"});
  for (int np = 1; np <= 3; ++np)
    for (int nc = 0; nc <= 3; ++nc)
      for (double f : {20.0, 35.0, 50.0}) add_row(t, {np * f, double(np), double(nc), np * f * (4.0 - 0.5 * (np - nc))});
  const auto r = calibrate(CalibrationModel::MultiPumpFlow, t);
  EXPECT_NEAR(r.params.at("a1"), 4.0, 1e-9);
  EXPECT_NEAR(r.params.at("a2"), 0.5, 1e-9);
}

TEST(Calibration, MultiPumpRankDeficient) {
  auto t = make_table({"pump_freq_sum_hz", "n_pumps", "n_chillers", "condenser_flow_kgs"});
  for (double f : {20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0}) add_row(t, {f, 1, 1, 4 * f});
  try {
    calibrate(CalibrationModel::MultiPumpFlow, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankDeficient);
  }
}

TEST(Calibration, NoiselessTower) {
  std::mt19937_64 rng(2);
  const TowerParams p{-0.03, 0.3, 0.8};
  const auto r = calibrate(CalibrationModel::Tower, tower_table(p, 0.0, rng));
  EXPECT_NEAR(r.params.at("c8"), p.c8, 1e-6 * std::abs(p.c8));
  EXPECT_NEAR(r.params.at("c9"), p.c9, 1e-6 * p.c9);
  EXPECT_NEAR(r.params.at("c10"), p.c10, 1e-6 * p.c10);
}

TEST(Calibration, NoisyTowerWithinFivePercent) {
  const TowerParams p{-0.03, 0.3, 0.8};
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const auto r = calibrate(CalibrationModel::Tower, tower_table(p, 0.01, rng));
    EXPECT_NEAR(r.params.at("c8"), p.c8, 0.05 * std::abs(p.c8));
    EXPECT_NEAR(r.params.at("c9"), p.c9, 0.05 * p.c9);
    EXPECT_NEAR(r.params.at("c10"), p.c10, 0.05 * p.c10);
  }
}

TEST(Calibration, NoiselessChiller) {
  std::mt19937_64 rng(3);
  const auto p = plant_chiller();
  const auto r = calibrate(CalibrationModel::Chiller, chiller_table(p, 0.0, rng));
  EXPECT_LT(r.rmse, 1e-6 * r.mean_output);
  EXPECT_NEAR(r.params.at("a"), p.a_coef, 1e-6 * p.a_coef);
  EXPECT_NEAR(r.params.at("b"), p.b_coef, 1e-6 * std::abs(p.b_coef));
  EXPECT_NEAR(r.params.at("d"), p.d_coef, 1e-6 * std::abs(p.d_coef));
  EXPECT_EQ(r.params.at("c"), 1.0);
}

TEST(Calibration, NoisyChillerPredictsPower) {
  std::mt19937_64 rng(4);
  const auto p = plant_chiller();
  const auto r = calibrate(CalibrationModel::Chiller, chiller_table(p, 0.01, rng));
  EXPECT_NEAR(r.params.at("a"), p.a_coef, 0.05 * p.a_coef);
  EXPECT_NEAR(r.params.at("b"), p.b_coef, 0.05 * std::abs(p.b_coef));
  EXPECT_NEAR(r.params.at("d"), p.d_coef, 0.05 * std::abs(p.d_coef));
}

TEST(Calibration, RejectsShortOrIncompleteTables) {
  auto t = make_table({"pump_freq_hz", "pump_power_kw"});
  add_row(t, {1, 1});
  EXPECT_THROW(calibrate(CalibrationModel::PumpPower, t), Error);
  auto u = make_table({"pump_freq_hz"});
  try {
    calibrate(CalibrationModel::PumpPower, u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingId);
  }
}

TEST(Calibration, ReportSerializes) {
  std::mt19937_64 rng(1);
  const auto r = calibrate(CalibrationModel::PumpPower, pump_power_table(0.4, 0.0, rng));
  const auto j = to_json(r);
  EXPECT_EQ(j.at("model"), "pump_power");
  EXPECT_EQ(j.at("residuals").size(), r.rows);
}

TEST(Table, ParsesUnitsCommentsAndReportsLine) {
  std::istringstream in("# header comment\ntimestamp,dry_bulb[F]\n\n0,50\n3600,60\n");
  const auto t = read_delimited(in);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.unit("dry_bulb"), "F");
  EXPECT_EQ(t.line_numbers[1], 5);
  std::istringstream bad("a,b\n1,x\n");
  try {
    read_delimited(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
