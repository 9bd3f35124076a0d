#include <cmath>

#include <gtest/gtest.h>

#include "coolsim/bench.hpp"
#include "coolsim/errors.hpp"
#include "coolsim/task.hpp"

using namespace coolsim;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Contract;  // sentinel: nothing thrown
}

TaskParts parts_of(const TaskDef& t) {
  TaskParts p;
  p.id = t.id;
  p.objective = t.reward;
  p.controls = t.controls;
  p.scenarios = t.scenarios;
  p.noise = t.noise;
  p.constraints = t.constraints;
  p.episode_length = t.episode_length;
  p.baseline = t.baseline;
  p.optimal = t.optimal;
  p.optimal_note = t.optimal_note;
  return p;
}

std::map<std::string, double> power_observation(double c1, double c2, double c3, double mask2, double mask3) {
  return {{"chiller_1.compressor_power_kw", c1}, {"chiller_2.compressor_power_kw", c2},
          {"chiller_3.compressor_power_kw", c3}, {"mask.chiller_1", 1.0},
          {"mask.chiller_2", mask2},             {"mask.chiller_3", mask3},
          {ids::kTowerFanPower, 0.0},            {ids::kCondenserPumpPower, 0.0},
          {ids::kChilledPumpPower, 0.0}};
}

}  // namespace

TEST(Reward, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(base_reward(0.0, 1000.0), 1.0);
  EXPECT_DOUBLE_EQ(base_reward(1000.0, 1000.0), 0.5);
  EXPECT_DOUBLE_EQ(base_reward(3000.0, 1000.0), 0.25);
  EXPECT_DOUBLE_EQ(base_reward(500.0, 250.0), 1.0 / 3.0);
}

TEST(Reward, StrictlyDecreasingInPower) {
  double prev = 2.0;
  for (double w = 0.0; w <= 1e5; w += 137.0) {
    const double r = base_reward(w, 1000.0);
    EXPECT_LT(r, prev);
    EXPECT_GT(r, 0.0);
    prev = r;
  }
}

TEST(Reward, SensitivityMatchesDerivative) {
  // d/dW of 1/(W/a + 1) is -1/(a (W/a + 1)^2).
  const double a = 1000.0, w = 700.0, h = 1e-3;
  const double numeric = (base_reward(w + h, a) - base_reward(w - h, a)) / (2 * h);
  EXPECT_NEAR(numeric, -1.0 / (a * std::pow(w / a + 1.0, 2)), 1e-10);
}

TEST(Reward, NegativePowerRejected) {
  EXPECT_EQ(code_of([] { base_reward(-1.0, 1000.0); }), Errc::InvalidArgument);
}

TEST(Reward, SoftViolationsArePenalizedAndFloored) {
  RewardParams p;
  const std::vector<Constraint> cs{{"a", 0, 1, 2, 3}, {"b", 0, 1, 2, 3}};
  p.weights["b"] = 0.3;
  EXPECT_DOUBLE_EQ(reward(1000.0, p, cs, {ConstraintStatus::Ok, ConstraintStatus::Ok}), 0.5);
  EXPECT_DOUBLE_EQ(reward(1000.0, p, cs, {ConstraintStatus::SoftLow, ConstraintStatus::Ok}), 0.4);
  EXPECT_DOUBLE_EQ(reward(1000.0, p, cs, {ConstraintStatus::SoftLow, ConstraintStatus::SoftHigh}), 0.1);
  EXPECT_DOUBLE_EQ(reward(3000.0, p, cs, {ConstraintStatus::SoftLow, ConstraintStatus::SoftHigh}), 0.0);
  // Hard statuses end the episode; they are not part of the soft penalty.
  EXPECT_DOUBLE_EQ(reward(1000.0, p, cs, {ConstraintStatus::HardHigh, ConstraintStatus::Ok}), 0.5);
}

TEST(Reward, PowerFromMaskedObservation) {
  EXPECT_DOUBLE_EQ(observed_total_power(power_observation(1000.0, 0.0, 0.0, 0.0, 0.0)), 1000.0);
  // Padded chillers never contribute, whatever their placeholder holds.
  EXPECT_DOUBLE_EQ(observed_total_power(power_observation(1000.0, 55.0, 77.0, 0.0, 0.0)), 1000.0);
  EXPECT_DOUBLE_EQ(observed_total_power(power_observation(1000.0, 55.0, 77.0, 1.0, 0.0)), 1055.0);
  const TaskDef t = make_task(tasks::kEasyUnconstrained);
  EXPECT_DOUBLE_EQ(task_reward_and_observations(t, power_observation(1000.0, 9.0, 9.0, 0.0, 0.0), {}).first, 0.5);
}

TEST(Reward, MissingPowerObservableIsError) {
  auto obs = power_observation(1.0, 0, 0, 0, 0);
  obs.erase(ids::kTowerFanPower);
  EXPECT_EQ(code_of([&] { observed_total_power(obs); }), Errc::MissingId);
}

TEST(Catalog, SixTasksInDifficultyOrder) {
  const auto& ids = task_ids();
  ASSERT_EQ(ids.size(), 6u);
  EXPECT_EQ(ids.front(), tasks::kEasyUnconstrained);
  EXPECT_EQ(ids.back(), tasks::kHardFull);
  for (const auto& id : ids) {
    const TaskDef t = make_task(id);
    EXPECT_EQ(t.id, id);
    EXPECT_EQ(t.episode_length, 10);
    EXPECT_DOUBLE_EQ(t.reward.alpha, 1000.0);
  }
  EXPECT_EQ(code_of([] { make_task("easy/nothing"); }), Errc::UnknownTask);
}

TEST(Catalog, ControlsAndConstraints) {
  EXPECT_EQ(make_task(tasks::kEasyUnconstrained).controls, std::vector<std::string>{ids::kNumChillers});
  EXPECT_TRUE(make_task(tasks::kEasyUnconstrained).constraints.empty());

  const TaskDef c = make_task(tasks::kEasyConstrained);
  ASSERT_EQ(c.constraints.size(), 1u);
  EXPECT_EQ(c.constraints[0], (Constraint{ids::kNumChillers, 1, 1, 2, 2}));

  EXPECT_EQ(make_task(tasks::kEasyChillerTemp).controls, std::vector<std::string>{ids::kChillerLeavingTemp});
  EXPECT_EQ(make_task(tasks::kEasyChillerTemp).optimal->at(ids::kChillerLeavingTemp), 75.0);

  const TaskDef m = make_task(tasks::kMediumConstrainedSupply);
  EXPECT_EQ(m.constraints.size(), 2u);
  ASSERT_EQ(m.scenarios.size(), 1u);
  EXPECT_EQ(m.scenarios[0].kind, ScenarioKind::DynamicsNonstationarity);

  EXPECT_EQ(make_task(tasks::kMediumCondenser).controls,
            (std::vector<std::string>{ids::kNumChillers, ids::kTowerReturnTemp}));
  EXPECT_EQ(make_task(tasks::kHardFull).controls.size(), ids::action_specs().size());
}

TEST(Composition, RebuildsEveryCatalogTask) {
  for (const auto& id : task_ids()) {
    const TaskDef t = make_task(id);
    EXPECT_EQ(compose_task(parts_of(t)), t) << id;
  }
}

TEST(Composition, RejectsMalformedParts) {
  TaskParts p;
  p.id = "x";
  EXPECT_EQ(code_of([&] { compose_task(p); }), Errc::InvalidArgument);  // no controls

  p.controls = {"warp_drive"};
  EXPECT_EQ(code_of([&] { compose_task(p); }), Errc::IncompatibleId);

  p.controls = {ids::kNumChillers, ids::kNumChillers};
  EXPECT_EQ(code_of([&] { compose_task(p); }), Errc::IncompatibleId);

  p.controls = {ids::kNumChillers};
  p.constraints = {{"not_an_observable", 0, 1, 2, 3}};
  EXPECT_EQ(code_of([&] { compose_task(p); }), Errc::IncompatibleId);

  p.constraints = {};
  p.optimal = ControlMap{{ids::kDiffPressure, 10}};
  EXPECT_EQ(code_of([&] { compose_task(p); }), Errc::IncompatibleId);

  p.optimal.reset();
  Scenario s;
  s.kind = ScenarioKind::FrozenControls;
  s.ids = {ids::kSupplyTemp};  // a measurement, not a control
  p.scenarios = {s};
  EXPECT_EQ(code_of([&] { compose_task(p); }), Errc::IncompatibleId);
}

TEST(Composition, JsonRoundTrip) {
  for (const auto& id : task_ids()) {
    const TaskDef t = make_task(id);
    EXPECT_EQ(task_from_json(to_json(t)), t) << id;
  }
  EXPECT_EQ(task_from_json(nlohmann::json(tasks::kEasyConstrained)), make_task(tasks::kEasyConstrained));
  const TaskDef derived = task_from_json({{"base", tasks::kEasyConstrained}, {"id", "short"}, {"episode_length", 3}});
  EXPECT_EQ(derived.episode_length, 3);
  EXPECT_EQ(derived.constraints, make_task(tasks::kEasyConstrained).constraints);
}

TEST(Catalog, DeclaredOptimumIsBestConstantPolicy) {
  for (const char* id : {tasks::kEasyUnconstrained, tasks::kEasyConstrained}) {
    EnvConfig c;
    c.task = make_task(id);
    const auto ranked = enumerate_constant_policies(c, 4, {0});
    ASSERT_FALSE(ranked.empty());
    EXPECT_EQ(ranked.front().controls, *c.task.optimal) << id;
  }
}
