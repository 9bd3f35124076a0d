#include "coolsim/calibration.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "coolsim/components.hpp"
#include "coolsim/errors.hpp"

namespace coolsim {

namespace {

struct ModelInfo {
  CalibrationModel model;
  const char* id;
  std::vector<std::string> columns;
  int free;
};

const std::vector<ModelInfo>& models() {
  static const std::vector<ModelInfo> table = {
      {CalibrationModel::PumpPower, "pump_power", {"pump_freq_hz", "pump_power_kw"}, 1},
      {CalibrationModel::FanPower, "fan_power", {"fan_freq_hz", "fan_power_kw"}, 1},
      {CalibrationModel::PumpFlow, "pump_flow", {"pump_freq_hz", "pump_flow_kgs"}, 1},
      {CalibrationModel::FanFlow, "fan_flow", {"fan_freq_hz", "fan_airflow_kgs"}, 1},
      {CalibrationModel::MultiPumpFlow,
       "multi_pump_flow",
       {"pump_freq_sum_hz", "n_pumps", "n_chillers", "condenser_flow_kgs"},
       2},
      {CalibrationModel::Tower,
       "tower",
       {"tower_inlet_temp_k", "wet_bulb_k", "pump_freq_sum_hz", "fan_freq_sum_hz",
        "tower_outlet_temp_k"},
       3},
      {CalibrationModel::Chiller, "chiller", {"chiller_load_kw", "compressor_power_kw"}, 3},
  };
  return table;
}

const ModelInfo& info(CalibrationModel m) {
  for (const auto& i : models())
    if (i.model == m) return i;
  fail(Errc::InvalidArgument, "unknown calibration model");
}

// Least squares with rank detection; throws RankDeficient when the design
// matrix does not have full column rank.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  require(qr.rank() == x.cols(), Errc::RankDeficient,
          "design matrix has rank " + std::to_string(qr.rank()) + " < " +
              std::to_string(x.cols()));
  return qr.solve(y);
}

void finish(CalibrationReport& r, const std::vector<double>& predicted,
            const std::vector<double>& observed) {
  r.rows = observed.size();
  r.residuals.resize(observed.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    r.residuals[i] = predicted[i] - observed[i];
    sq += r.residuals[i] * r.residuals[i];
  }
  r.rmse = std::sqrt(sq / observed.size());
  r.mean_output = std::accumulate(observed.begin(), observed.end(), 0.0) / observed.size();
}

CalibrationReport fit_cube_law(const DelimitedTable& t, const std::string& freq_col,
                               const std::string& power_col, const std::string& key) {
  const auto f = t.column(freq_col);
  const auto w = t.column(power_col);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(f.size()), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    require(f[i] > 0.0 && w[i] > 0.0, Errc::Domain,
            "cube-law fit needs positive frequency and power (row " + std::to_string(i + 1) + ")");
    y(static_cast<Eigen::Index>(i)) = std::log(w[i]) - 3.0 * std::log(f[i]);
  }
  const double gain = std::exp(solve_linear(x, y)(0));
  CalibrationReport r;
  r.params[key] = gain;
  std::vector<double> pred(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pred[i] = gain * f[i] * f[i] * f[i];
  finish(r, pred, w);
  return r;
}

CalibrationReport fit_proportional(const DelimitedTable& t, const std::string& freq_col,
                                   const std::string& flow_col, const std::string& key) {
  const auto f = t.column(freq_col);
  const auto m = t.column(flow_col);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(f.size()), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = f[i];
    y(static_cast<Eigen::Index>(i)) = m[i];
  }
  const double gain = solve_linear(x, y)(0);
  CalibrationReport r;
  r.params[key] = gain;
  std::vector<double> pred(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pred[i] = gain * f[i];
  finish(r, pred, m);
  return r;
}

CalibrationReport fit_multi_pump(const DelimitedTable& t) {
  const auto fsum = t.column("pump_freq_sum_hz");
  const auto np = t.column("n_pumps");
  const auto nc = t.column("n_chillers");
  const auto m = t.column("condenser_flow_kgs");
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x(i, 0) = fsum[k];
    x(i, 1) = -fsum[k] * (np[k] - nc[k]);
    y(i) = m[k];
  }
  const Eigen::VectorXd beta = solve_linear(x, y);
  CalibrationReport r;
  r.params["a1"] = beta(0);
  r.params["a2"] = beta(1);
  std::vector<double> pred(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    pred[i] = fsum[i] * (beta(0) - beta(1) * (np[i] - nc[i]));
  finish(r, pred, m);
  return r;
}

// ln(-ln(1 - eff)) = ln(-c8) + c9 ln P_pump + c10 ln P_fan
// x = (ln(-c8), c9, c10); residual is predicted minus measured outlet.
struct TowerResidual {
  using Scalar = double;
  const std::vector<double>& tin;
  const std::vector<double>& twb;
  const std::vector<double>& pp;
  const std::vector<double>& pf;
  const std::vector<double>& tout;

  int values() const { return static_cast<int>(tin.size()); }

  double strength(const Eigen::VectorXd& x, std::size_t i) const {
    return std::exp(x(0) + x(1) * std::log(pp[i]) + x(2) * std::log(pf[i]));
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    for (std::size_t i = 0; i < tin.size(); ++i) {
      const double s = strength(x, i);
      fvec(static_cast<Eigen::Index>(i)) = tin[i] + (tin[i] - twb[i]) * std::expm1(-s) - tout[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    for (std::size_t i = 0; i < tin.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double s = strength(x, i);
      const double g = -(tin[i] - twb[i]) * std::exp(-s) * s;
      jac(k, 0) = g;
      jac(k, 1) = g * std::log(pp[i]);
      jac(k, 2) = g * std::log(pf[i]);
    }
    return 0;
  }
};

CalibrationReport fit_tower(const DelimitedTable& t, const CalibrationOptions& opt) {
  const auto tin = t.column("tower_inlet_temp_k");
  const auto twb = t.column("wet_bulb_k");
  const auto pp = t.column("pump_freq_sum_hz");
  const auto pf = t.column("fan_freq_sum_hz");
  const auto tout = t.column("tower_outlet_temp_k");

  // Start from the log-linearized exponent on rows strictly inside (0, 1)
  // effectiveness; noisy rows near saturation are left to the refinement.
  std::vector<std::array<double, 4>> lin;
  for (std::size_t k = 0; k < tin.size(); ++k) {
    require(tin[k] > twb[k] && pp[k] > 0.0 && pf[k] > 0.0, Errc::Domain,
            "tower fit: row " + std::to_string(k + 1) + " outside the model domain");
    const double eff = (tin[k] - tout[k]) / (tin[k] - twb[k]);
    if (eff > 1e-9 && eff < 1.0 - 1e-9)
      lin.push_back({std::log(pp[k]), std::log(pf[k]), std::log(-std::log1p(-eff)), 0.0});
  }
  require(lin.size() >= 3, Errc::RankDeficient, "tower fit: fewer than 3 usable rows");
  const auto n = static_cast<Eigen::Index>(lin.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = lin[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = row[0];
    x(i, 2) = row[1];
    y(i) = row[2];
  }
  Eigen::VectorXd params = solve_linear(x, y);

  TowerResidual functor{tin, twb, pp, pf, tout};
  Eigen::LevenbergMarquardt<TowerResidual> lm(functor);
  lm.parameters.maxfev = opt.max_iterations;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(params);
  require(status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation,
          Errc::NonConvergence,
          "tower fit did not converge in " + std::to_string(opt.max_iterations) + " evaluations");

  TowerParams p{-std::exp(params(0)), params(1), params(2)};
  CalibrationReport r;
  r.params["c8"] = p.c8;
  r.params["c9"] = p.c9;
  r.params["c10"] = p.c10;
  r.iterations = static_cast<int>(lm.iter);
  std::vector<double> pred(tin.size());
  for (std::size_t i = 0; i < tin.size(); ++i)
    pred[i] = tin[i] - (tin[i] - twb[i]) * tower_effectiveness(pp[i], pf[i], p);
  finish(r, pred, tout);
  return r;
}

struct ChillerResidual {
  using Scalar = double;
  const std::vector<double>& q;
  const std::vector<double>& w;
  double c;

  int values() const { return static_cast<int>(q.size()); }

  // x = (A, B, D)
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double den = x(2) * q[i] + c;
      const double num = x(0) - (x(1) + c) * q[i] - x(2) * q[i] * q[i];
      fvec(static_cast<Eigen::Index>(i)) = num / den - w[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double den = x(2) * q[i] + c;
      const double pred = (x(0) - (x(1) + c) * q[i] - x(2) * q[i] * q[i]) / den;
      jac(k, 0) = 1.0 / den;
      jac(k, 1) = -q[i] / den;
      jac(k, 2) = -q[i] * (q[i] + pred) / den;
    }
    return 0;
  }
};

CalibrationReport fit_chiller(const DelimitedTable& t, const CalibrationOptions& opt) {
  const auto q = t.column("chiller_load_kw");
  const auto w = t.column("compressor_power_kw");
  const double c = opt.chiller_c_norm;
  require(c != 0.0, Errc::InvalidArgument, "chiller fit: normalization C must be nonzero");
  const auto n = static_cast<Eigen::Index>(q.size());

  // Equation-error start: C (W + q) = A - B q - D (q^2 + q W)
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x(i, 0) = 1.0;
    x(i, 1) = -q[k];
    x(i, 2) = -(q[k] * q[k] + q[k] * w[k]);
    y(i) = c * (w[k] + q[k]);
  }
  Eigen::VectorXd params = solve_linear(x, y);

  // Output-error refinement.
  ChillerResidual functor{q, w, c};
  Eigen::LevenbergMarquardt<ChillerResidual> lm(functor);
  lm.parameters.maxfev = opt.max_iterations;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(params);
  require(status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation,
          Errc::NonConvergence,
          "chiller fit did not converge in " + std::to_string(opt.max_iterations) + " evaluations");
  require(status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters, Errc::NonConvergence,
          "chiller fit: improper solver input");

  CalibrationReport r;
  r.params["a"] = params(0);
  r.params["b"] = params(1);
  r.params["c"] = c;
  r.params["d"] = params(2);
  r.iterations = static_cast<int>(lm.iter);
  const ChillerParams cp{params(0), params(1), c, params(2), 1.0, 1.0};
  std::vector<double> pred(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) pred[i] = compressor_power(q[i], cp);
  finish(r, pred, w);
  return r;
}

}  // namespace

CalibrationModel parse_calibration_model(const std::string& id) {
  for (const auto& i : models())
    if (id == i.id) return i.model;
  fail(Errc::Resolution, "unknown calibration model '" + id + "'");
}

std::string to_string(CalibrationModel model) { return info(model).id; }

std::vector<std::string> calibration_columns(CalibrationModel model) { return info(model).columns; }

int free_coefficients(CalibrationModel model) { return info(model).free; }

CalibrationReport calibrate(CalibrationModel model, const DelimitedTable& telemetry,
                            const CalibrationOptions& options) {
  for (const auto& col : calibration_columns(model)) {
    require(telemetry.has(col), Errc::MissingId,
            to_string(model) + " telemetry lacks column '" + col + "'");
  }
  const auto needed = static_cast<std::size_t>(4 * free_coefficients(model));
  require(telemetry.rows.size() >= needed, Errc::InvalidArgument,
          to_string(model) + " calibration needs at least " + std::to_string(needed) +
              " rows, got " + std::to_string(telemetry.rows.size()));

  CalibrationReport r;
  switch (model) {
    case CalibrationModel::PumpPower:
      r = fit_cube_law(telemetry, "pump_freq_hz", "pump_power_kw", "c12");
      break;
    case CalibrationModel::FanPower:
      r = fit_cube_law(telemetry, "fan_freq_hz", "fan_power_kw", "c14");
      break;
    case CalibrationModel::PumpFlow:
      r = fit_proportional(telemetry, "pump_freq_hz", "pump_flow_kgs", "c11");
      break;
    case CalibrationModel::FanFlow:
      r = fit_proportional(telemetry, "fan_freq_hz", "fan_airflow_kgs", "c13");
      break;
    case CalibrationModel::MultiPumpFlow: r = fit_multi_pump(telemetry); break;
    case CalibrationModel::Tower: r = fit_tower(telemetry, options); break;
    case CalibrationModel::Chiller: r = fit_chiller(telemetry, options); break;
  }
  r.model = to_string(model);
  return r;
}

nlohmann::json to_json(const CalibrationReport& report) {
  nlohmann::json j;
  j["model"] = report.model;
  j["params"] = report.params;
  j["rows"] = report.rows;
  j["rmse"] = report.rmse;
  j["mean_output"] = report.mean_output;
  j["iterations"] = report.iterations;
  j["residuals"] = report.residuals;
  return j;
}

}  // namespace coolsim
