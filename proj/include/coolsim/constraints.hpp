#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coolsim {

enum class ConstraintStatus { Ok, SoftLow, SoftHigh, HardLow, HardHigh };

const char* to_string(ConstraintStatus s);
/// 0 ok, -1/+1 soft low/high, -2/+2 hard low/high.
int status_code(ConstraintStatus s);
inline bool is_hard(ConstraintStatus s) {
  return s == ConstraintStatus::HardLow || s == ConstraintStatus::HardHigh;
}
inline bool is_soft(ConstraintStatus s) {
  return s == ConstraintStatus::SoftLow || s == ConstraintStatus::SoftHigh;
}

/// Range constraint on one observable or control. Soft bounds are the
/// comfortable band; crossing a hard bound ends the episode.
struct Constraint {
  std::string id;
  double hard_lower = 0.0;
  double soft_lower = 0.0;
  double soft_upper = 0.0;
  double hard_upper = 0.0;

  /// hard_lower <= soft_lower < soft_upper <= hard_upper
  void validate() const;
  bool operator==(const Constraint&) const = default;
};

/// Values on a soft bound are ok; values on a hard bound are soft
/// violations; only values past a hard bound are hard violations.
ConstraintStatus evaluate_constraint(const Constraint& c, double value);

std::vector<ConstraintStatus> evaluate_constraints(const std::map<std::string, double>& values,
                                                   const std::vector<Constraint>& constraints);

nlohmann::json to_json(const Constraint& c);
Constraint constraint_from_json(const nlohmann::json& j);

}  // namespace coolsim
