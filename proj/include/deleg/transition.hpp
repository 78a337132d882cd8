#pragma once

// One-step semantics. Given a state and a single action, the successor is the
// total well-founded model of the step rules over the time pair (t, t+1):
// facts at t are fixed by the input state, and the mutually recursive
// definitions at t+1 (delete, new, inactive, chains, grant capability) are
// solved by alternating fixpoint.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "deleg/state.hpp"

namespace deleg {

enum class ActionErrorCode {
  UnknownPrincipal,
  SelfTarget,
  UnauthorizedGrant,
  GrantShadowed,
  NoAuthorizationToRevoke,
  UnauthorizedNegative,
};

std::string_view to_string(ActionErrorCode code);

class ActionError : public std::runtime_error {
 public:
  ActionError(ActionErrorCode code, const Action& action);
  ActionErrorCode code() const { return code_; }
  const Action& action() const { return action_; }

 private:
  ActionErrorCode code_;
  Action action_;
};

// The step rules left some atom undefined. Never expected on states reachable
// through valid actions; a test failure if it occurs.
class NonTotalModel : public std::runtime_error {
 public:
  NonTotalModel(const Action& action, std::size_t undefined_atoms);
  std::size_t undefined_atoms() const { return undefined_; }

 private:
  std::size_t undefined_;
};

struct Triple {
  std::string grantor;
  std::string grantee;
  Permission permission = Permission::FF;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// What a step changed. A triple may appear in both `deleted` and `added` when
// it was deleted by one rule and re-created by another.
struct StepDelta {
  std::vector<Triple> deleted;
  std::vector<Triple> added;
  std::vector<Triple> inactivated;
  std::vector<NegativeAuthorization> neg_added;

  bool empty() const {
    return deleted.empty() && added.empty() && inactivated.empty() && neg_added.empty();
  }
  friend bool operator==(const StepDelta&, const StepDelta&) = default;
};

// Requires a structurally valid state. nullopt means the action may be applied.
std::optional<ActionErrorCode> validate_action(const AuthorizationState& state, const Action& action);

struct StepResult {
  AuthorizationState state;
  StepDelta delta;
};

// Throws ActionError if validate_action fails, NonTotalModel if the step has
// no total well-founded model.
StepResult apply_action(const AuthorizationState& state, const Action& action);

class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::size_t step, ActionErrorCode code, const Action& action);
  std::size_t step() const { return step_; }
  ActionErrorCode code() const { return code_; }

 private:
  std::size_t step_;
  ActionErrorCode code_;
};

struct SimulationResult {
  // states[0] is the input; states[k] follows actions[k-1].
  std::vector<AuthorizationState> states;
  std::vector<StepDelta> deltas;

  const AuthorizationState& final_state() const { return states.back(); }
};

// Left fold of apply_action; throws SimulationError at the first invalid action.
SimulationResult simulate(const AuthorizationState& state, std::span<const Action> actions);

// All valid actions from `state`, in (actor, scheme, target) canonical order.
std::vector<Action> valid_actions(const AuthorizationState& state);

}  // namespace deleg
