#pragma once

// Reference implementation of the revocation procedures, written step by step
// with path enumeration and repeated passes. Slow on purpose and independent
// of the fixpoint code in transition; used only to cross-check it.

#include <cstdint>
#include <vector>

#include "deleg/state.hpp"

namespace deleg {

// Throws ActionError exactly when apply_action would.
AuthorizationState oracle_apply(const AuthorizationState& state, const Action& action);

// Passes taken by the last oracle_apply on this thread. Tests check it against
// |pos| + |principals|^2.
std::size_t oracle_last_pass_count();

struct ReachableSample {
  AuthorizationState state;
  std::vector<Action> trace;
};

// Principals are named A, B, C, ... (A is the SOA). Applies `depth` valid
// actions drawn uniformly from valid_actions; stops early if none exists.
ReachableSample random_reachable_state(std::uint64_t seed, std::size_t n, std::size_t depth);

// Empty-authorization state over A, B, C, ...
AuthorizationState empty_state(std::size_t n);

}  // namespace deleg
