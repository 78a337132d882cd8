#pragma once

// One-step goal search: try every valid action of an actor, keep those whose
// successor satisfies the goal, rank by how much active holding changed.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deleg/state.hpp"

namespace deleg {

struct Literal {
  enum class Kind { Access, NotAccess, Holds, NotHolds, Unchanged };
  Kind kind = Kind::Access;
  std::string principal;
  Permission permission = Permission::TT;  // Holds / NotHolds only

  friend bool operator==(const Literal&, const Literal&) = default;
};

// Conjunction.
struct Goal {
  std::vector<Literal> literals;

  friend bool operator==(const Goal&, const Goal&) = default;
};

std::string to_string(const Literal& literal);
std::string to_string(const Goal& goal);

class GoalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws GoalError for an empty goal or a principal missing from `state`.
void check_goal(const AuthorizationState& state, const Goal& goal);

// holds uses ACTIVE_ONLY chains; unchanged(p) compares access right and the
// actively held set.
bool eval_goal(const AuthorizationState& pre, const AuthorizationState& post, const Goal& goal);

// Changed (principal, permission) active holdings plus access-right flips.
std::size_t cost(const AuthorizationState& pre, const AuthorizationState& post);

struct PlanResult {
  Action action;
  AuthorizationState post_state;
  std::size_t cost = 0;
};

// Sorted by (cost, scheme in declaration order, target name). Throws
// UnknownPrincipal for an unknown actor and GoalError for a bad goal.
std::vector<PlanResult> plan(const AuthorizationState& state, const std::string& actor,
                             const Goal& goal);
std::vector<PlanResult> plan_serial(const AuthorizationState& state, const std::string& actor,
                                    const Goal& goal);
std::optional<PlanResult> plan_min_cost(const AuthorizationState& state, const std::string& actor,
                                        const Goal& goal);

}  // namespace deleg
