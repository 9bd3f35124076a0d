#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "coolsim/errors.hpp"
#include "coolsim/units.hpp"
#include "coolsim/weather.hpp"

using namespace coolsim;

TEST(Weather, SingleRow) {
  std::istringstream in("timestamp,dry_bulb[K],wet_bulb[K],rel_humidity\n0,300,295,0.6\n");
  const auto s = load_weather(in);
  ASSERT_EQ(s.samples.size(), 1u);
  EXPECT_EQ(sample(s, -10).t_dry_bulb, 300.0);
  EXPECT_EQ(sample(s, 1e6).t_wet_bulb, 295.0);
}

TEST(Weather, FahrenheitTag) {
  std::istringstream in("timestamp,dry_bulb[F],wet_bulb[F],rel_humidity\n0,77,68,0.6\n");
  const auto s = load_weather(in);
  EXPECT_NEAR(s.samples[0].point.t_dry_bulb, 298.15, 1e-12);
  EXPECT_NEAR(s.samples[0].point.t_wet_bulb, 293.15, 1e-12);
}

TEST(Weather, RejectsWetBulbAboveDryBulbWithRow) {
  std::istringstream in(
      "timestamp,dry_bulb,wet_bulb,rel_humidity\n0,300,295,0.5\n300,300,301,0.5\n");
  try {
    load_weather(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PsychrometricViolation);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Weather, MissingColumn) {
  std::istringstream in("timestamp,dry_bulb,rel_humidity\n0,300,0.5\n");
  EXPECT_THROW(load_weather(in), Error);
}

TEST(Weather, HourlyMidpoints) {
  std::ostringstream csv;
  csv << "timestamp,dry_bulb,wet_bulb,rel_humidity\n";
  for (int h = 0; h < 24; ++h) {
    const double db = 290 + 5 * std::sin(h * 0.3);
    csv << h * 3600 << ',' << db << ',' << db - 3 - 0.1 * h << ',' << 0.4 + 0.01 * h << '\n';
  }
  std::istringstream in(csv.str());
  const auto s = load_weather(in);
  ASSERT_EQ(s.samples.size(), 24u);
  for (int h = 0; h + 1 < 24; ++h) {
    const auto& a = s.samples[h].point;
    const auto& b = s.samples[h + 1].point;
    const auto m = sample(s, h * 3600 + 1800);
    EXPECT_NEAR(m.t_dry_bulb, 0.5 * (a.t_dry_bulb + b.t_dry_bulb), 1e-12);
    EXPECT_NEAR(m.t_wet_bulb, 0.5 * (a.t_wet_bulb + b.t_wet_bulb), 1e-12);
    EXPECT_NEAR(m.rel_humidity, 0.5 * (a.rel_humidity + b.rel_humidity), 1e-12);
    EXPECT_LE(m.t_wet_bulb, m.t_dry_bulb);
    EXPECT_EQ(sample(s, h * 3600).t_dry_bulb, a.t_dry_bulb);
  }
}

TEST(Weather, EmptySeries) {
  try {
    sample(WeatherSeries{}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptySeries);
  }
}

TEST(Load, DirectFormula) {
  LoadProfile p;
  p.schedule = {100};
  p.dry_bulb_gain = 2;
  p.reference_temp = 290;
  EXPECT_DOUBLE_EQ(load_at(p, {293, 290, 0.5}, 0), 106.0);
  EXPECT_DOUBLE_EQ(load_at(p, {280, 275, 0.5}, 0), 100.0);
}

TEST(Load, ScheduleWrapsDaily) {
  LoadProfile p;
  p.schedule = {100, 300};  // 00:00 and 12:00
  EXPECT_DOUBLE_EQ(p.schedule_at(0), 100);
  EXPECT_DOUBLE_EQ(p.schedule_at(6 * 3600), 200);
  EXPECT_DOUBLE_EQ(p.schedule_at(18 * 3600), 200);
  EXPECT_DOUBLE_EQ(p.schedule_at(86400 + 6 * 3600), 200);
}

TEST(WetBulb, SaturatedAirAndKnownPoint) {
  EXPECT_EQ(wet_bulb_from_humidity(300.0, 1.0), 300.0);
  // 25 C at 50 % RH has a wet bulb near 18 C on psychrometric charts.
  EXPECT_NEAR(wet_bulb_from_humidity(298.15, 0.5) - 273.15, 18.0, 0.5);
  double prev = 0;
  for (double rh = 0.05; rh < 1.0; rh += 0.05) {
    const double wb = wet_bulb_from_humidity(300.0, rh);
    EXPECT_LE(wb, 300.0);
    EXPECT_GT(wb, prev);
    prev = wb;
  }
}

TEST(Ou, StationaryMomentsAndDeterminism) {
  OuPerturbation ou;
  ou.sigma = 1.5;
  ou.seed = 42;
  const auto a = ou.offsets(200000);
  EXPECT_EQ(a, ou.offsets(200000));
  EXPECT_EQ(a[0], 0.0);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  double var = 0;
  for (double x : a) var += (x - mean) * (x - mean);
  var /= a.size();
  EXPECT_NEAR(std::sqrt(var), 1.5, 0.1);
  // lag-1 autocorrelation equals exp(-theta dt)
  double cov = 0;
  for (std::size_t i = 1; i < a.size(); ++i) cov += (a[i] - mean) * (a[i - 1] - mean);
  cov /= (a.size() - 1);
  EXPECT_NEAR(cov / var, std::exp(-ou.theta * ou.interval), 0.02);
}
