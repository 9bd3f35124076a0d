#include "coolsim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "coolsim/errors.hpp"
#include "coolsim/units.hpp"

namespace coolsim {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(Errc::Parse, "bad number '" + s + "'");
}

}  // namespace

Policy make_policy(const std::string& spec, const TaskDef& task, std::uint64_t seed) {
  const auto constant = [](ControlMap c) { return [c](const TimeStepRecord&) { return c; }; };
  if (spec == "baseline" || spec == "optimal") {
    const auto& p = spec == "baseline" ? task.baseline : task.optimal;
    if (!p) fail(Errc::Resolution, "task '" + task.id + "' has no " + spec + " policy");
    return constant(*p);
  }
  if (spec == "random") {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    const auto ids = task.controls;
    return [rng, ids](const TimeStepRecord&) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> a(ids.size());
      for (auto& x : a) x = u(*rng);
      return convert_action(a, ids);
    };
  }
  if (spec.rfind("constant:", 0) == 0) {
    std::vector<double> a;
    for (const auto& s : split(spec.substr(9), ',')) a.push_back(parse_number(s));
    return constant(convert_action(a, task.controls));
  }
  if (spec.rfind("controls:", 0) == 0) {
    ControlMap c;
    for (const auto& kv : split(spec.substr(9), ',')) {
      const auto eq = kv.find('=');
      require(eq != std::string::npos, Errc::Parse, "expected id=value in '" + kv + "'");
      const std::string id = kv.substr(0, eq);
      require(std::find(task.controls.begin(), task.controls.end(), id) != task.controls.end(),
              Errc::Resolution, "'" + id + "' is not a control of task '" + task.id + "'");
      c[id] = parse_number(kv.substr(eq + 1));
    }
    return constant(c);
  }
  fail(Errc::Resolution, "unknown policy '" + spec + "'");
}

EpisodeResult run_episode(Environment& env, const Policy& policy) {
  EpisodeResult r;
  r.records.push_back(env.reset());
  while (r.records.back().kind != StepKind::Last) {
    r.records.push_back(env.step_controls(policy(r.records.back())));
    r.episode_return += r.records.back().reward.value_or(0.0);
    ++r.steps;
  }
  r.terminated_early = r.records.back().hard_violation;
  return r;
}

// ---------------------------------------------------------------------------

void SweepSpec::validate(const PlantConfig& plant) const {
  require(points >= 2, Errc::InvalidArgument, "sweep needs at least 2 points");
  require(!variants.empty(), Errc::InvalidArgument, "sweep needs at least one variant");
  const auto lim = plant.limits.find(parameter);
  require(lim != plant.limits.end(), Errc::MissingId, "unknown sweep parameter '" + parameter + "'");
  require(lower < upper && lower >= lim->second.lower && upper <= lim->second.upper, Errc::LimitViolation,
          "sweep range outside the limits of '" + parameter + "'");
}

std::vector<SweepRow> fidelity_sweep(const PlantConfig& plant, const SweepSpec& spec) {
  spec.validate(plant);
  std::vector<SweepRow> rows;
  for (const auto& variant : spec.variants) {
    PlantConfig cfg = plant;
    for (const auto& [id, v] : spec.overrides) cfg.set_parameter(id, v);
    for (const auto& [key, n] : variant.topology) {
      if (key == "chillers") cfg.chillers = n;
      else if (key == "towers") cfg.towers = n;
      else if (key == "chilled_pumps") cfg.chilled_pumps = n;
      else if (key == "condenser_pumps") cfg.condenser_pumps = n;
      else if (key == "free_cooling_hex") cfg.free_cooling_hex = n;
      else fail(Errc::MissingId, "unknown topology key '" + key + "'");
    }
    ControlMap c = default_controls();
    for (const auto& [id, v] : spec.controls) c[id] = v;
    for (const auto& [id, v] : variant.controls) c[id] = v;
    c = clamp_controls(c, cfg);
    const PlantControls controls = to_plant_controls(c);

    // Each point starts from the previous one's steady state.
    auto [net, state] = build_network(cfg);
    for (int i = 0; i < spec.points; ++i) {
      const double x = spec.lower + (spec.upper - spec.lower) * i / (spec.points - 1);
      net.config.set_parameter(spec.parameter, x);
      const Boundary b = boundary_at(net.config, 0.0);
      SweepRow row;
      row.variant = variant.label;
      row.x = x;
      row.building_load_kw = b.building_load;
      try {
        const auto r = solve_steady(net, state, controls, b);
        state = r.state;
        row.converged = r.converged;
        row.iterations = r.iterations;
        const auto& s = r.state;
        row.supply_temp_f = units::kelvin_to_fahrenheit(s.nodes[net.topology.chw_supply].temperature);
        row.compressor_kw = s.compressor_power();
        row.fan_kw = s.fan_power;
        row.chilled_pump_kw = s.chilled_pump_power;
        row.condenser_pump_kw = s.condenser_pump_power;
        row.total_kw = s.total_power();
      } catch (const Error& e) {
        if (e.code() != Errc::Instability) throw;
        // Diverged: record as unconverged and restart the next point fresh.
        row.converged = false;
        row.supply_temp_f = row.compressor_kw = row.total_kw = std::nan("");
        state = build_network(net.config).second;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

const std::vector<std::string>& sweep_names() {
  static const std::vector<std::string> v{"chiller-count", "tower-count", "dry-bulb-ramp", "crossover"};
  return v;
}

SweepSpec named_sweep(const std::string& name) {
  SweepSpec s;
  s.name = name;
  // Peak-load conditions so the equipment count limits the supply
  // temperature: a low leaving setpoint the plant cannot fully reach.
  const std::map<std::string, double> peak{{"load_base_kw", 4000.0}};
  const ControlMap peak_controls{{ids::kChillerLeavingTemp, 40.0},
                                 {ids::kTowerReturnTemp, 32.0},
                                 {ids::kCondenserFlow, 200.0},
                                 {ids::kNumCondenserPumps, 3.0},
                                 {ids::kNumChilledPumps, 3.0}};
  if (name == "chiller-count") {
    s.parameter = "dry_bulb_k";
    s.lower = 298.15;
    s.upper = 308.15;
    s.points = 3;
    s.overrides = peak;
    s.controls = peak_controls;
    for (int n = 1; n <= 3; ++n)
      s.variants.push_back({"chillers=" + std::to_string(n), {{ids::kNumChillers, double(n)}}, {}});
  } else if (name == "tower-count") {
    // Towers matter once heat rejection is the bottleneck, so the condenser
    // flow is held low enough for the chillers to run into the head limit.
    s.parameter = "dry_bulb_k";
    s.lower = 298.15;
    s.upper = 305.15;
    s.points = 5;
    s.overrides = peak;
    s.controls = peak_controls;
    s.controls[ids::kNumChillers] = 3.0;
    s.controls[ids::kCondenserFlow] = 60.0;
    for (int n = 1; n <= 3; ++n)
      s.variants.push_back({"towers=" + std::to_string(n), {}, {{"towers", n}}});
  } else if (name == "dry-bulb-ramp") {
    s.parameter = "dry_bulb_k";
    s.lower = 283.15;
    s.upper = 313.15;
    s.points = 16;
    s.variants.push_back({"chillers=1", {{ids::kNumChillers, 1.0}}, {}});
  } else if (name == "crossover") {
    s.parameter = "dry_bulb_k";
    s.lower = units::fahrenheit_to_kelvin(50.0);
    s.upper = units::fahrenheit_to_kelvin(104.0);
    s.points = 28;
    s.variants.push_back({"chillers=1", {{ids::kNumChillers, 1.0}}, {}});
    s.variants.push_back({"chillers=2", {{ids::kNumChillers, 2.0}}, {}});
  } else {
    fail(Errc::MissingId, "unknown sweep '" + name + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double episode_return(Environment& env, const ControlMap& controls) {
  return run_episode(env, [&](const TimeStepRecord&) { return controls; }).episode_return;
}

}  // namespace

std::vector<ConstantPolicyResult> enumerate_constant_policies(const EnvConfig& config, int grid,
                                                              const std::vector<std::uint64_t>& seeds) {
  require(grid >= 2, Errc::InvalidArgument, "grid needs at least 2 points");
  require(!seeds.empty(), Errc::InvalidArgument, "at least one seed required");
  Environment probe(config);
  std::vector<std::vector<double>> axes;
  for (const auto& s : probe.action_spec()) {
    std::vector<double> axis;
    if (s.integer) {
      for (double v = s.minimum; v <= s.maximum; v += 1.0) axis.push_back(v);
    } else {
      for (int i = 0; i < grid; ++i) axis.push_back(s.minimum + (s.maximum - s.minimum) * i / (grid - 1));
    }
    axes.push_back(axis);
  }
  std::vector<Environment> envs;
  for (auto seed : seeds) {
    EnvConfig c = config;
    c.seed = seed;
    envs.emplace_back(c);
  }

  std::vector<ConstantPolicyResult> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ConstantPolicyResult r;
    for (std::size_t d = 0; d < axes.size(); ++d) r.controls[config.task.controls[d]] = axes[d][idx[d]];
    for (auto& env : envs) {
      const auto ep = run_episode(env, [&](const TimeStepRecord&) { return r.controls; });
      r.mean_return += ep.episode_return / envs.size();
      r.terminated_early = r.terminated_early || ep.terminated_early;
    }
    out.push_back(r);
    std::size_t d = 0;
    for (; d < axes.size(); ++d) {
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
    }
    if (d == axes.size()) break;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.mean_return > b.mean_return; });
  return out;
}

CemResult train_cem(const EnvConfig& config, const CemOptions& o, std::uint64_t seed) {
  require(o.population >= 2 && o.episodes >= o.population, Errc::InvalidArgument,
          "cem needs a population >= 2 and a budget of at least one generation");
  require(o.elite_fraction > 0.0 && o.elite_fraction <= 1.0, Errc::InvalidArgument,
          "elite fraction must lie in (0, 1]");
  EnvConfig c = config;
  c.seed = seed;
  Environment env(c);
  const auto& ids = c.task.controls;
  const std::size_t dim = ids.size();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> mean(dim, 0.0), sd(dim, o.init_std);
  const int elites = std::max(1, static_cast<int>(std::round(o.elite_fraction * o.population)));
  CemResult r;
  while (r.episodes_used + o.population <= o.episodes) {
    std::vector<std::pair<double, std::vector<double>>> scored;
    double total = 0.0;
    for (int k = 0; k < o.population; ++k) {
      std::vector<double> a(dim);
      for (std::size_t d = 0; d < dim; ++d) a[d] = std::clamp(mean[d] + sd[d] * normal(rng), -1.0, 1.0);
      const double ret = episode_return(env, convert_action(a, ids));
      total += ret;
      scored.emplace_back(ret, std::move(a));
    }
    r.episodes_used += o.population;
    r.iteration_returns.push_back(total / o.population);
    std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t d = 0; d < dim; ++d) {
      double m = 0.0, v = 0.0;
      for (int k = 0; k < elites; ++k) m += scored[k].second[d] / elites;
      for (int k = 0; k < elites; ++k) v += std::pow(scored[k].second[d] - m, 2) / elites;
      mean[d] = m;
      sd[d] = std::max(std::sqrt(v), o.min_std);
    }
  }
  r.mean_action = mean;
  r.controls = convert_action(mean, ids);
  r.final_return = episode_return(env, r.controls);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<BenchmarkCell> benchmark(const BenchmarkSpec& spec) {
  require(!spec.seeds.empty(), Errc::InvalidArgument, "benchmark needs at least one seed");
  require(!spec.tasks.empty() && !spec.policies.empty(), Errc::InvalidArgument,
          "benchmark needs tasks and policies");
  require(spec.episodes >= 1 && spec.actors >= 1, Errc::InvalidArgument,
          "episodes and actors must be positive");

  std::vector<BenchmarkCell> cells;
  for (const auto& t : spec.tasks)
    for (const auto& p : spec.policies) cells.push_back({t, p, spec.seeds, {}, {}, {}, {}});

  auto run_cell = [&](BenchmarkCell& cell) {
    try {
      EnvConfig base;
      base.task = make_task(cell.task);
      for (const auto& [id, v] : spec.parameters) base.plant.set_parameter(id, v);
      for (auto seed : cell.seeds) {
        EnvConfig c = base;
        c.seed = seed;
        std::vector<double> series;
        if (cell.policy == "cem") {
          series = train_cem(c, spec.cem, seed).iteration_returns;
        } else {
          Environment env(c);
          const Policy policy = make_policy(cell.policy, c.task, seed);
          for (int e = 0; e < spec.episodes; ++e) series.push_back(run_episode(env, policy).episode_return);
        }
        cell.returns.push_back(std::move(series));
      }
      std::size_t n = cell.returns.front().size();
      for (const auto& s : cell.returns) n = std::min(n, s.size());
      cell.mean.assign(n, 0.0);
      cell.std.assign(n, 0.0);
      const double k = static_cast<double>(cell.returns.size());
      for (std::size_t i = 0; i < n; ++i) {
        for (const auto& s : cell.returns) cell.mean[i] += s[i] / k;
        for (const auto& s : cell.returns) cell.std[i] += std::pow(s[i] - cell.mean[i], 2) / k;
        cell.std[i] = std::sqrt(cell.std[i]);
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
  };
  const int n = std::min<int>(spec.actors, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace coolsim
