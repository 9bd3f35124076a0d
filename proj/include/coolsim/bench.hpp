#pragma once

// Experiment harness: episodes, fidelity sweeps, constant-policy
// enumeration, a cross-entropy learner and multi-seed benchmarks.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/env.hpp"

namespace coolsim {

/// Maps the latest record to the controls for the next step (boundary
/// units, task controls only).
using Policy = std::function<ControlMap(const TimeStepRecord&)>;

/// "baseline", "optimal", "random", "constant:<a1>,<a2>,..." (normalized
/// action), "controls:<id>=<v>,..." (boundary units).
Policy make_policy(const std::string& spec, const TaskDef& task, std::uint64_t seed);

struct EpisodeResult {
  std::vector<TimeStepRecord> records;
  double episode_return = 0.0;
  int steps = 0;
  bool terminated_early = false;  // ended on a hard violation
};

EpisodeResult run_episode(Environment& env, const Policy& policy);

// ---------------------------------------------------------------------------
// Fidelity sweeps

struct SweepVariant {
  std::string label;
  ControlMap controls;                   // over the sweep's base controls
  std::map<std::string, int> topology;   // chillers, towers, ... overrides
};

struct SweepSpec {
  std::string name;
  std::string parameter;  // plant parameter swept
  double lower = 0.0;
  double upper = 0.0;
  int points = 2;
  std::map<std::string, double> overrides;  // fixed plant parameters
  ControlMap controls;                      // base setpoints, boundary units
  std::vector<SweepVariant> variants;

  void validate(const PlantConfig& plant) const;
};

struct SweepRow {
  std::string variant;
  double x = 0.0;
  bool converged = false;
  int iterations = 0;
  double building_load_kw = 0.0;
  double supply_temp_f = 0.0;
  double compressor_kw = 0.0;
  double fan_kw = 0.0;
  double chilled_pump_kw = 0.0;
  double condenser_pump_kw = 0.0;
  double total_kw = 0.0;
};

/// Steady operating point for every sweep point and variant. Unconverged
/// points stay in the table with converged = false.
std::vector<SweepRow> fidelity_sweep(const PlantConfig& plant, const SweepSpec& spec);

/// Canned sweeps: "chiller-count", "tower-count", "dry-bulb-ramp",
/// "crossover".
SweepSpec named_sweep(const std::string& name);
const std::vector<std::string>& sweep_names();

// ---------------------------------------------------------------------------
// Policies over the action set

struct ConstantPolicyResult {
  ControlMap controls;
  double mean_return = 0.0;
  bool terminated_early = false;
};

/// Every constant policy on the task controls: all integer values, and
/// `grid` evenly spaced values for continuous ids. Returns sorted by mean
/// return (best first), averaged over `seeds`.
std::vector<ConstantPolicyResult> enumerate_constant_policies(const EnvConfig& config, int grid,
                                                              const std::vector<std::uint64_t>& seeds);

struct CemOptions {
  int population = 20;
  double elite_fraction = 0.25;
  int episodes = 500;  // budget per run
  double init_std = 0.8;
  double min_std = 0.02;
};

struct CemResult {
  std::vector<double> mean_action;       // normalized
  ControlMap controls;                   // mean action in boundary units
  std::vector<double> iteration_returns; // mean population return per iteration
  double final_return = 0.0;             // one episode of the mean action
  int episodes_used = 0;
};

/// Derivative-free search over a constant normalized action.
CemResult train_cem(const EnvConfig& config, const CemOptions& options, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchmarkCell {
  std::string task;
  std::string policy;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> returns;  // per seed, per episode or iteration
  std::vector<double> mean;
  std::vector<double> std;
  std::string error;  // non-empty when the cell failed
};

struct BenchmarkSpec {
  std::vector<std::string> tasks;
  std::vector<std::string> policies;  // make_policy specs or "cem"
  std::vector<std::uint64_t> seeds;
  int episodes = 1;   // per seed for scripted policies
  int actors = 1;     // worker threads
  CemOptions cem;
  std::map<std::string, double> parameters;  // plant overrides
};

std::vector<BenchmarkCell> benchmark(const BenchmarkSpec& spec);

}  // namespace coolsim
