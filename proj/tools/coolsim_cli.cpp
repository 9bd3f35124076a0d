// Command-line harness over the simulator and the task suite.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "coolsim/bench.hpp"
#include "coolsim/calibration.hpp"
#include "coolsim/errors.hpp"
#include "coolsim/synth.hpp"
#include "coolsim/version.hpp"

namespace fs = std::filesystem;
using namespace coolsim;

namespace {

struct Header {
  std::string kind;
  std::string config_hash;
  std::string seed;
  std::map<std::string, std::string> extra;
};

void write_header(std::ostream& out, const Header& h) {
  out << "# coolsim " << kVersion << "\n";
  out << "# kind: " << h.kind << "\n";
  out << "# config_hash: " << h.config_hash << "\n";
  out << "# seed: " << h.seed << "\n";
  for (const auto& [k, v] : h.extra) out << "# " << k << ": " << v << "\n";
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::Resolution, "cannot write '" + path.string() + "'");
  out << std::setprecision(12);
  return out;
}

EnvConfig env_from_args(const std::string& config_path, const std::string& task, std::uint64_t seed,
                        bool seed_given) {
  EnvConfig c;
  if (!config_path.empty()) c = load_env_config(config_path);
  if (!task.empty()) c.task = make_task(task);
  if (seed_given || config_path.empty()) c.seed = seed;
  c.validate();
  return c;
}

PlantConfig plant_from_arg(const std::string& path) {
  return path.empty() ? default_plant_config() : load_plant_config(path);
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  return out;
}

std::vector<std::string> parse_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ControlMap parse_assignments(const std::vector<std::string>& items) {
  ControlMap out;
  for (const auto& kv : items) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, Errc::Parse, "expected id=value in '" + kv + "'");
    out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chilled-water plant simulator and control task suite"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // run
  std::string run_config, run_task, run_policy = "baseline", out_dir = "out";
  std::uint64_t seed = 0;
  int run_episodes = 1;
  auto* run = app.add_subcommand("run", "Run episodes and write trajectory files");
  run->add_option("-c,--config", run_config, "Environment config (JSON)");
  run->add_option("-t,--task", run_task, "Catalog task id, overrides the config task");
  run->add_option("-p,--policy", run_policy, "baseline | optimal | random | constant:a,.. | controls:id=v,..");
  auto* seed_opt = run->add_option("-s,--seed", seed, "Environment seed");
  run->add_option("-n,--episodes", run_episodes, "Episodes")->check(CLI::PositiveNumber);
  run->add_option("-o,--out", out_dir, "Output directory");

  // sweep
  std::string sweep_name = "crossover", sweep_plant;
  auto* sweep = app.add_subcommand("sweep", "Steady-state fidelity sweeps");
  sweep->add_option("-n,--name", sweep_name, "chiller-count | tower-count | dry-bulb-ramp | crossover | all");
  sweep->add_option("--plant", sweep_plant, "Plant config (JSON)");
  std::vector<std::string> sweep_controls;
  sweep->add_option("--control", sweep_controls, "Base setpoint override id=value (repeatable)");
  sweep->add_option("-o,--out", out_dir, "Output directory");

  // snapshot
  std::string snap_plant, snap_out;
  std::vector<std::string> snap_controls;
  int snap_steps = 0;
  auto* snap = app.add_subcommand("snapshot", "Write the plant state as an id,value table");
  snap->add_option("--plant", snap_plant, "Plant config (JSON)");
  snap->add_option("--control", snap_controls, "Setpoint id=value (repeatable), applied for --steps steps");
  snap->add_option("--steps", snap_steps, "Environment steps after the warm-started reset")->check(CLI::NonNegativeNumber);
  snap->add_option("-o,--out", snap_out, "Output table (CSV), stdout when omitted");

  // enumerate
  std::string enum_config, enum_task, enum_seeds = "0";
  int grid = 36;
  auto* enumerate = app.add_subcommand("enumerate", "Rank every constant policy of a task");
  enumerate->add_option("-c,--config", enum_config, "Environment config (JSON)");
  enumerate->add_option("-t,--task", enum_task, "Catalog task id");
  enumerate->add_option("--seeds", enum_seeds, "Comma-separated seeds");
  enumerate->add_option("--grid", grid, "Points per continuous control")->check(CLI::Range(2, 1000));
  enumerate->add_option("-o,--out", out_dir, "Output directory");

  // benchmark
  std::string bench_tasks = "easy/unconstrained-chillers,easy/constrained-chillers,easy/chiller-temperature";
  std::string bench_policies = "baseline,random,cem", bench_seeds = "0,1,2";
  BenchmarkSpec bspec;
  auto* bench = app.add_subcommand("benchmark", "Multi-seed policy benchmark");
  bench->add_option("--tasks", bench_tasks, "Comma-separated task ids");
  bench->add_option("--policies", bench_policies, "Comma-separated policies (cem = learner)");
  bench->add_option("--seeds", bench_seeds, "Comma-separated seeds");
  bench->add_option("--episodes", bspec.episodes, "Episodes per seed for scripted policies");
  bench->add_option("--cem-episodes", bspec.cem.episodes, "Learner budget per seed");
  bench->add_option("-j,--actors", bspec.actors, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("-o,--out", out_dir, "Output directory");

  // calibrate
  std::string cal_model, cal_table, cal_out;
  auto* cal = app.add_subcommand("calibrate", "Fit one analytical model to telemetry");
  cal->add_option("-m,--model", cal_model, "pump_power | fan_power | pump_flow | fan_flow | multi_pump_flow | tower | chiller")
      ->required();
  cal->add_option("-i,--input", cal_table, "Telemetry table (CSV)")->required();
  cal->add_option("-o,--out", cal_out, "Report file (JSON), stdout when omitted");

  // synth
  std::string syn_model, syn_calibration, syn_out;
  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Write synthetic telemetry drawn from a calibration");
  synth->add_option("-m,--model", syn_model, "Calibration model the table feeds")->required();
  synth->add_option("--calibration", syn_calibration, "Generating calibration file, defaults to the built-in one");
  synth->add_option("-n,--rows", syn.rows, "Rows")->check(CLI::PositiveNumber);
  synth->add_option("--noise", syn.relative_noise, "Relative gaussian noise on the output column");
  synth->add_option("-s,--seed", syn.seed, "Random seed");
  synth->add_option("-o,--out", syn_out, "Output table (CSV), stdout when omitted");

  // validate-config
  std::string val_path, val_kind = "env";
  auto* val = app.add_subcommand("validate-config", "Parse and validate a config document");
  val->add_option("path", val_path, "Config file")->required();
  val->add_option("-k,--kind", val_kind, "env | plant | calibration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const EnvConfig cfg = env_from_args(run_config, run_task, seed, seed_opt->count() > 0);
      Environment env(cfg);
      const Policy policy = make_policy(run_policy, cfg.task, cfg.seed);
      const std::string hash = config_hash(to_json(cfg));
      auto summary = open_out(out_dir, "episodes.csv");
      write_header(summary, {"episodes", hash, std::to_string(cfg.seed), {{"task", cfg.task.id}, {"policy", run_policy}}});
      summary << "episode,steps,return,terminated_early\n";
      for (int e = 0; e < run_episodes; ++e) {
        const auto r = run_episode(env, policy);
        auto traj = open_out(out_dir, "trajectory_" + std::to_string(e) + ".json");
        traj << trajectory_json(cfg, r.records).dump(1) << "\n";
        summary << e << "," << r.steps << "," << r.episode_return << "," << r.terminated_early << "\n";
        std::cout << "episode " << e << ": return " << r.episode_return << " over " << r.steps << " steps"
                  << (r.terminated_early ? " (hard violation)" : "") << "\n";
      }
    } else if (*sweep) {
      const PlantConfig plant = plant_from_arg(sweep_plant);
      const std::string hash = config_hash(to_json(plant));
      std::vector<std::string> names = sweep_name == "all" ? sweep_names() : std::vector<std::string>{sweep_name};
      for (const auto& name : names) {
        SweepSpec spec = named_sweep(name);
        for (const auto& [id, v] : parse_assignments(sweep_controls)) spec.controls[id] = v;
        const auto rows = fidelity_sweep(plant, spec);
        auto out = open_out(out_dir, "sweep_" + name + ".csv");
        write_header(out, {"sweep", hash, "none", {{"sweep", name}, {"parameter", spec.parameter}}});
        out << "variant," << spec.parameter
            << ",converged,iterations,building_load_kw,supply_temp_f,compressor_kw,fan_kw,chilled_pump_kw,"
               "condenser_pump_kw,total_kw\n";
        for (const auto& r : rows)
          out << r.variant << "," << r.x << "," << r.converged << "," << r.iterations << "," << r.building_load_kw
              << "," << r.supply_temp_f << "," << r.compressor_kw << "," << r.fan_kw << "," << r.chilled_pump_kw
              << "," << r.condenser_pump_kw << "," << r.total_kw << "\n";
        auto manifest = open_out(out_dir, "sweep_" + name + ".plot.json");
        manifest << nlohmann::json{{"data", "sweep_" + name + ".csv"},
                                   {"x", spec.parameter},
                                   {"y", {"supply_temp_f", "compressor_kw", "total_kw"}},
                                   {"series", "variant"},
                                   {"mark", "line"}}
                        .dump(1)
                 << "\n";
        std::cout << "sweep " << name << ": " << rows.size() << " rows\n";
      }
    } else if (*snap) {
      const PlantConfig plant = plant_from_arg(snap_plant);
      FacilitySimulator sim;
      sim.reset(plant);
      const ControlMap controls = parse_assignments(snap_controls);
      for (const auto& [id, v] : controls) ids::action_spec(id);  // unknown ids fail before stepping
      for (int k = 0; k < snap_steps; ++k) sim.step(controls);
      std::ostringstream text;
      text << std::setprecision(12);
      write_header(text, {"snapshot", config_hash(to_json(plant)), "none",
                          {{"clock_s", std::to_string(sim.state().clock)}, {"steps", std::to_string(snap_steps)}}});
      text << "id,value\n";
      for (const auto& [id, v] : sim.controls()) text << "control." << id << "," << v << "\n";
      for (const auto& [id, v] : sim.measurements()) text << id << "," << v << "\n";
      if (snap_out.empty()) {
        std::cout << text.str();
      } else {
        std::ofstream(snap_out) << text.str();
      }
    } else if (*enumerate) {
      const EnvConfig cfg = env_from_args(enum_config, enum_task, 0, false);
      const auto seeds = parse_seeds(enum_seeds);
      const auto ranked = enumerate_constant_policies(cfg, grid, seeds);
      auto out = open_out(out_dir, "constant_policies.csv");
      write_header(out, {"enumeration", config_hash(to_json(cfg)), enum_seeds, {{"task", cfg.task.id}}});
      for (const auto& id : cfg.task.controls) out << id << ",";
      out << "mean_return,terminated_early\n";
      for (const auto& r : ranked) {
        for (const auto& id : cfg.task.controls) out << r.controls.at(id) << ",";
        out << r.mean_return << "," << r.terminated_early << "\n";
      }
      std::cout << "best:";
      for (const auto& [id, v] : ranked.front().controls) std::cout << " " << id << "=" << v;
      std::cout << " return " << ranked.front().mean_return << "\n";
    } else if (*bench) {
      bspec.tasks = parse_list(bench_tasks);
      bspec.policies = parse_list(bench_policies);
      bspec.seeds = parse_seeds(bench_seeds);
      const auto cells = benchmark(bspec);
      auto out = open_out(out_dir, "benchmark.csv");
      write_header(out, {"benchmark", config_hash(to_json(default_plant_config())), bench_seeds,
                         {{"actors", std::to_string(bspec.actors)}}});
      out << "task,policy,index,mean_return,std_return,error\n";
      int failures = 0;
      for (const auto& c : cells) {
        if (!c.error.empty()) {
          out << c.task << "," << c.policy << ",,,," << std::quoted(c.error) << "\n";
          std::cerr << "cell " << c.task << " / " << c.policy << " failed: " << c.error << "\n";
          ++failures;
          continue;
        }
        for (std::size_t i = 0; i < c.mean.size(); ++i)
          out << c.task << "," << c.policy << "," << i << "," << c.mean[i] << "," << c.std[i] << ",\n";
        std::cout << c.task << " / " << c.policy << ": final mean " << c.mean.back() << " +- " << c.std.back() << "\n";
      }
      if (failures > 0) return 2;
    } else if (*cal) {
      const auto report = calibrate(parse_calibration_model(cal_model), read_delimited_file(cal_table));
      const std::string text = to_json(report).dump(1);
      if (cal_out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream(cal_out) << text << "\n";
      }
    } else if (*synth) {
      const auto model = parse_calibration_model(syn_model);
      const PlantCalibration truth =
          syn_calibration.empty() ? default_plant_config().calibration : load_calibration_file(syn_calibration);
      const auto table = synthesize_telemetry(model, truth, syn);
      std::ostringstream text;
      text << std::setprecision(17);
      text << "# coolsim " << kVersion << "\n# kind: telemetry\n# model: " << syn_model << "\n# seed: " << syn.seed
           << "\n# noise: " << syn.relative_noise << "\n";
      write_delimited(text, table);
      if (syn_out.empty()) {
        std::cout << text.str();
      } else {
        std::ofstream(syn_out) << text.str();
      }
    } else if (*val) {
      std::string hash;
      if (val_kind == "env") {
        hash = config_hash(to_json(load_env_config(val_path)));
      } else if (val_kind == "plant") {
        hash = config_hash(to_json(load_plant_config(val_path)));
      } else if (val_kind == "calibration") {
        hash = config_hash(to_json(load_calibration_file(val_path)));
      } else {
        fail(Errc::InvalidArgument, "unknown config kind '" + val_kind + "'");
      }
      std::cout << "ok " << hash << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
