#include "coolsim/synth.hpp"

#include <random>
#include <vector>

#include "coolsim/components.hpp"
#include "coolsim/errors.hpp"

namespace coolsim {

namespace {

struct Rows {
  DelimitedTable table;
  void header(const std::vector<std::string>& names) {
    for (const auto& n : names) table.columns.push_back({n, ""});
  }
  void add(std::vector<double> row) {
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(static_cast<int>(table.rows.size()) + 1);
  }
};

}  // namespace

DelimitedTable synthesize_telemetry(CalibrationModel model, const PlantCalibration& truth,
                                    const SynthOptions& options) {
  truth.validate();
  require(options.rows >= 8, Errc::InvalidArgument, "synthetic telemetry needs at least 8 rows");
  require(options.relative_noise >= 0.0, Errc::InvalidArgument, "noise must be nonnegative");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  auto noisy = [&](double v) { return options.relative_noise == 0.0 ? v : v * (1.0 + options.relative_noise * n(rng)); };
  const auto& bank = truth.condenser_pumps;
  const std::size_t count = options.rows;
  Rows out;
  out.header(calibration_columns(model));

  switch (model) {
    case CalibrationModel::PumpPower:
      for (std::size_t i = 0; i < count; ++i) {
        const double f = 10.0 + 50.0 * u(rng);
        out.add({f, noisy(pump_flow_power(f, bank).power)});
      }
      break;
    case CalibrationModel::FanPower:
      for (std::size_t i = 0; i < count; ++i) {
        const double f = 10.0 + 50.0 * u(rng);
        out.add({f, noisy(fan_flow_power(f, bank).power)});
      }
      break;
    case CalibrationModel::PumpFlow:
      for (std::size_t i = 0; i < count; ++i) {
        const double f = 10.0 + 50.0 * u(rng);
        out.add({f, noisy(pump_flow_power(f, bank).flow)});
      }
      break;
    case CalibrationModel::FanFlow:
      for (std::size_t i = 0; i < count; ++i) {
        const double f = 10.0 + 50.0 * u(rng);
        out.add({f, noisy(fan_flow_power(f, bank).flow)});
      }
      break;
    case CalibrationModel::MultiPumpFlow: {
      std::uniform_int_distribution<int> pumps(1, 3), chillers(0, 3);
      for (std::size_t i = 0; i < count; ++i) {
        const int np = pumps(rng), nc = chillers(rng);
        const std::vector<double> freqs(np, 20.0 + 40.0 * u(rng));
        out.add({freqs[0] * np, double(np), double(nc), noisy(multi_pump_flow(freqs, np, nc, bank))});
      }
      break;
    }
    case CalibrationModel::Tower:
      for (std::size_t i = 0; i < count; ++i) {
        const double wb = 285.0 + 8.0 * u(rng);
        const double tin = wb + 4.0 + 8.0 * u(rng);
        const double pf = 5.0 + 145.0 * u(rng), ff = 5.0 + 175.0 * u(rng);
        const double removed = noisy(tin - tower_leaving_temp(tin, wb, pf, ff, truth.tower));
        out.add({tin, wb, pf, ff, tin - removed});
      }
      break;
    case CalibrationModel::Chiller:
      for (std::size_t i = 0; i < count; ++i) {
        const double q = 50.0 + 2200.0 * u(rng);
        out.add({q, noisy(compressor_power(q, truth.chiller))});
      }
      break;
  }
  return out.table;
}

std::map<std::string, double> generating_coefficients(CalibrationModel model, const PlantCalibration& truth,
                                                      double chiller_c_norm) {
  const auto& bank = truth.condenser_pumps;
  switch (model) {
    case CalibrationModel::PumpPower: return {{"c12", bank.c12}};
    case CalibrationModel::FanPower: return {{"c14", bank.c14}};
    case CalibrationModel::PumpFlow: return {{"c11", bank.c11}};
    case CalibrationModel::FanFlow: return {{"c13", bank.c13}};
    case CalibrationModel::MultiPumpFlow: return {{"a1", bank.a1}, {"a2", bank.a2}};
    case CalibrationModel::Tower: return {{"c8", truth.tower.c8}, {"c9", truth.tower.c9}, {"c10", truth.tower.c10}};
    case CalibrationModel::Chiller: {
      const double s = chiller_c_norm / truth.chiller.c_coef;
      return {{"a", truth.chiller.a_coef * s},
              {"b", truth.chiller.b_coef * s},
              {"c", chiller_c_norm},
              {"d", truth.chiller.d_coef * s}};
    }
  }
  fail(Errc::InvalidArgument, "unknown calibration model");
}

}  // namespace coolsim
