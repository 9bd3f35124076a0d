#include "coolsim/constraints.hpp"

#include <cmath>

#include "coolsim/errors.hpp"

namespace coolsim {

const char* to_string(ConstraintStatus s) {
  switch (s) {
    case ConstraintStatus::Ok: return "ok";
    case ConstraintStatus::SoftLow: return "soft_low";
    case ConstraintStatus::SoftHigh: return "soft_high";
    case ConstraintStatus::HardLow: return "hard_low";
    case ConstraintStatus::HardHigh: return "hard_high";
  }
  return "?";
}

int status_code(ConstraintStatus s) {
  switch (s) {
    case ConstraintStatus::Ok: return 0;
    case ConstraintStatus::SoftLow: return -1;
    case ConstraintStatus::SoftHigh: return 1;
    case ConstraintStatus::HardLow: return -2;
    case ConstraintStatus::HardHigh: return 2;
  }
  return 0;
}

void Constraint::validate() const {
  require(!id.empty(), Errc::InvalidArgument, "constraint without id");
  const bool finite = std::isfinite(hard_lower) && std::isfinite(soft_lower) &&
                      std::isfinite(soft_upper) && std::isfinite(hard_upper);
  require(finite && hard_lower <= soft_lower && soft_lower < soft_upper && soft_upper <= hard_upper,
          Errc::InvalidArgument, "constraint '" + id + "' bounds are out of order");
}

ConstraintStatus evaluate_constraint(const Constraint& c, double v) {
  require(!std::isnan(v), Errc::InvalidArgument, "constraint '" + c.id + "' evaluated on NaN");
  if (v >= c.soft_lower && v <= c.soft_upper) return ConstraintStatus::Ok;
  if (v < c.soft_lower) return v >= c.hard_lower ? ConstraintStatus::SoftLow : ConstraintStatus::HardLow;
  return v <= c.hard_upper ? ConstraintStatus::SoftHigh : ConstraintStatus::HardHigh;
}

std::vector<ConstraintStatus> evaluate_constraints(const std::map<std::string, double>& values,
                                                   const std::vector<Constraint>& constraints) {
  std::vector<ConstraintStatus> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) {
    const auto it = values.find(c.id);
    if (it == values.end()) fail(Errc::MissingId, "constraint id '" + c.id + "' not observed");
    out.push_back(evaluate_constraint(c, it->second));
  }
  return out;
}

nlohmann::json to_json(const Constraint& c) {
  return {{"id", c.id},
          {"hard_lower", c.hard_lower},
          {"soft_lower", c.soft_lower},
          {"soft_upper", c.soft_upper},
          {"hard_upper", c.hard_upper}};
}

Constraint constraint_from_json(const nlohmann::json& j) {
  Constraint c;
  try {
    c.id = j.at("id").get<std::string>();
    c.hard_lower = j.at("hard_lower").get<double>();
    c.soft_lower = j.at("soft_lower").get<double>();
    c.soft_upper = j.at("soft_upper").get<double>();
    c.hard_upper = j.at("hard_upper").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("constraint: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace coolsim
