#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace coolsim {

struct WeatherPoint {
  double t_dry_bulb = 293.15;  // K
  double t_wet_bulb = 288.15;  // K
  double rel_humidity = 0.6;   // fraction

  void validate() const;
};

/// Wet-bulb temperature (K) reached by adiabatic saturation of air at the
/// given dry bulb and relative humidity, sea-level pressure.
double wet_bulb_from_humidity(double t_dry_bulb, double rel_humidity);

WeatherPoint weather_from_dry_bulb(double t_dry_bulb, double rel_humidity);

struct WeatherSample {
  double timestamp = 0.0;  // s
  WeatherPoint point;
};

struct WeatherSeries {
  std::vector<WeatherSample> samples;

  void validate() const;
};

/// Reads timestamp, dry_bulb, wet_bulb, rel_humidity columns. Temperature
/// columns take an optional unit tag, `[K]` (default) or `[F]`.
WeatherSeries load_weather(std::istream& in);
WeatherSeries load_weather_file(const std::string& path);

/// Linear interpolation per field, clamped to the first/last sample outside
/// the covered span.
WeatherPoint sample(const WeatherSeries& series, double t);

struct LoadProfile {
  /// Base load by time of day (kW), evenly spaced over 24 h and linearly
  /// interpolated with wrap-around. A single entry is a flat schedule.
  std::vector<double> schedule{600.0};
  double dry_bulb_gain = 40.0;       // kW/K
  double reference_temp = 291.15;    // K

  void validate() const;
  double schedule_at(double t) const;
};

double load_at(const LoadProfile& profile, const WeatherPoint& weather, double t);

/// Mean-reverting perturbation sampled at a fixed interval; the stationary
/// standard deviation is `sigma`.
struct OuPerturbation {
  double theta = 1.0 / 3600.0;  // 1/s
  double sigma = 2.0;           // K
  double interval = 300.0;      // s
  std::uint64_t seed = 0;

  /// Offsets for steps 0..n-1, starting from zero.
  std::vector<double> offsets(std::size_t n) const;
};

}  // namespace coolsim
