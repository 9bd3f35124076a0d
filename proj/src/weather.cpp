#include "coolsim/weather.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "coolsim/errors.hpp"
#include "coolsim/table.hpp"
#include "coolsim/units.hpp"

namespace coolsim {

namespace {

constexpr double kAtmosphere = 101.325;  // kPa

// Saturation vapour pressure over water (kPa), Magnus form.
double saturation_pressure(double t_kelvin) {
  const double c = t_kelvin - 273.15;
  return 0.61094 * std::exp(17.625 * c / (c + 243.04));
}

double to_kelvin(double value, const std::string& unit, int line) {
  if (unit.empty() || unit == "K") return value;
  if (unit == "F") return units::fahrenheit_to_kelvin(value);
  fail(Errc::Parse, "line " + std::to_string(line) + ": unknown temperature unit '" + unit + "'");
}

}  // namespace

void WeatherPoint::validate() const {
  require(std::isfinite(t_dry_bulb) && std::isfinite(t_wet_bulb), Errc::InvalidArgument,
          "weather temperatures must be finite");
  require(rel_humidity >= 0.0 && rel_humidity <= 1.0, Errc::PsychrometricViolation,
          "relative humidity outside [0, 1]");
  require(t_wet_bulb <= t_dry_bulb, Errc::PsychrometricViolation, "wet bulb above dry bulb");
}

double wet_bulb_from_humidity(double t_dry_bulb, double rel_humidity) {
  require(rel_humidity >= 0.0 && rel_humidity <= 1.0, Errc::PsychrometricViolation,
          "relative humidity outside [0, 1]");
  if (rel_humidity >= 1.0) return t_dry_bulb;
  const double vapour = rel_humidity * saturation_pressure(t_dry_bulb);
  // Psychrometer relation e = es(Tw) - gamma P (Td - Tw), monotone in Tw.
  auto residual = [&](double tw) {
    const double gamma = 6.53e-4 * (1.0 + 9.44e-4 * (tw - 273.15));
    return saturation_pressure(tw) - gamma * kAtmosphere * (t_dry_bulb - tw) - vapour;
  };
  boost::math::tools::eps_tolerance<double> tol(48);
  std::uintmax_t iters = 100;
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(residual, t_dry_bulb - 60.0, t_dry_bulb, tol, iters);
  return std::min(0.5 * (lo + hi), t_dry_bulb);
}

WeatherPoint weather_from_dry_bulb(double t_dry_bulb, double rel_humidity) {
  return {t_dry_bulb, wet_bulb_from_humidity(t_dry_bulb, rel_humidity), rel_humidity};
}

void WeatherSeries::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].point.validate();
    if (i > 0) {
      require(samples[i].timestamp > samples[i - 1].timestamp, Errc::InvalidArgument,
              "weather timestamps must be strictly increasing");
    }
  }
}

WeatherSeries load_weather(std::istream& in) {
  const DelimitedTable table = read_delimited(in);
  for (const char* col : {"timestamp", "dry_bulb", "wet_bulb", "rel_humidity"}) {
    require(table.has(col), Errc::Parse, std::string("weather file lacks column '") + col + "'");
  }
  const auto its = table.index("timestamp");
  const auto idb = table.index("dry_bulb");
  const auto iwb = table.index("wet_bulb");
  const auto irh = table.index("rel_humidity");

  WeatherSeries series;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    WeatherSample s;
    s.timestamp = row[its];
    s.point.t_dry_bulb = to_kelvin(row[idb], table.columns[idb].unit, line);
    s.point.t_wet_bulb = to_kelvin(row[iwb], table.columns[iwb].unit, line);
    s.point.rel_humidity = row[irh];
    try {
      s.point.validate();
    } catch (const Error& e) {
      fail(Errc::PsychrometricViolation,
           "row " + std::to_string(r + 1) + " (line " + std::to_string(line) + "): " + e.what());
    }
    series.samples.push_back(s);
  }
  std::stable_sort(series.samples.begin(), series.samples.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  series.validate();
  return series;
}

WeatherSeries load_weather_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Parse, "cannot open weather file '" + path + "'");
  return load_weather(in);
}

WeatherPoint sample(const WeatherSeries& series, double t) {
  const auto& s = series.samples;
  require(!s.empty(), Errc::EmptySeries, "cannot sample an empty weather series");
  if (t <= s.front().timestamp) return s.front().point;
  if (t >= s.back().timestamp) return s.back().point;
  const auto upper = std::upper_bound(s.begin(), s.end(), t,
                                      [](double v, const auto& x) { return v < x.timestamp; });
  const auto& b = *upper;
  const auto& a = *(upper - 1);
  const double w = (t - a.timestamp) / (b.timestamp - a.timestamp);
  auto lerp = [w](double x, double y) { return x + w * (y - x); };
  return {lerp(a.point.t_dry_bulb, b.point.t_dry_bulb), lerp(a.point.t_wet_bulb, b.point.t_wet_bulb),
          lerp(a.point.rel_humidity, b.point.rel_humidity)};
}

void LoadProfile::validate() const {
  require(!schedule.empty(), Errc::InvalidArgument, "load schedule is empty");
  for (double v : schedule)
    require(v >= 0.0, Errc::InvalidArgument, "load schedule entries must be nonnegative");
  require(dry_bulb_gain >= 0.0, Errc::InvalidArgument, "load gain must be nonnegative");
}

double LoadProfile::schedule_at(double t) const {
  if (schedule.size() == 1) return schedule.front();
  constexpr double kDay = 86400.0;
  const double pos = std::fmod(std::fmod(t, kDay) + kDay, kDay) / kDay * schedule.size();
  const auto i = static_cast<std::size_t>(pos) % schedule.size();
  const auto j = (i + 1) % schedule.size();
  const double w = pos - std::floor(pos);
  return schedule[i] + w * (schedule[j] - schedule[i]);
}

double load_at(const LoadProfile& profile, const WeatherPoint& weather, double t) {
  return profile.schedule_at(t) +
         profile.dry_bulb_gain * std::max(0.0, weather.t_dry_bulb - profile.reference_temp);
}

std::vector<double> OuPerturbation::offsets(std::size_t n) const {
  require(theta > 0.0 && sigma >= 0.0 && interval > 0.0, Errc::InvalidArgument,
          "OU perturbation needs theta > 0, sigma >= 0, interval > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double decay = std::exp(-theta * interval);
  const double scale = sigma * std::sqrt(1.0 - decay * decay);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) out[k] = decay * out[k - 1] + scale * normal(rng);
  return out;
}

}  // namespace coolsim
