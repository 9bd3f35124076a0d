#pragma once

// Conversions used only at the external boundary (observations, actions,
// weather files). Everything inside the simulator is SI: K, kg/s, kW, Hz, Pa.

namespace coolsim::units {

inline constexpr double kPaPerPsi = 6894.757293168361;
inline constexpr double kWaterCp = 4.186;        // kJ/(kg K)
inline constexpr double kWaterDensity = 1000.0;  // kg/m^3

constexpr double fahrenheit_to_kelvin(double f) { return (f - 32.0) * 5.0 / 9.0 + 273.15; }
constexpr double kelvin_to_fahrenheit(double k) { return (k - 273.15) * 9.0 / 5.0 + 32.0; }
constexpr double psi_to_pa(double psi) { return psi * kPaPerPsi; }
constexpr double pa_to_psi(double pa) { return pa / kPaPerPsi; }

}  // namespace coolsim::units
