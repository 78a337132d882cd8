#pragma once

// Connectivity invariants and bounded checking that one valid step preserves
// them. Exhaustive mode walks every state reachable within a depth bound;
// random modes sample reachable or arbitrary states.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deleg/state.hpp"

namespace deleg {

enum class Invariant { Connectivity, ActiveConnectivity };
enum class VerifyMode { Exhaustive, Random, RandomArbitrary };

std::string_view to_string(Invariant inv);
std::string_view to_string(VerifyMode mode);
std::optional<Invariant> parse_invariant(std::string_view text);

// An authorization whose grantor lacks the required (active) chain.
// `permission` is empty for negative authorizations.
struct Violation {
  std::string grantor;
  std::string grantee;
  std::optional<Permission> permission;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(const Violation& v);

std::vector<Violation> check_connectivity(const AuthorizationState& state);
std::vector<Violation> check_active_connectivity(const AuthorizationState& state);
std::vector<Violation> check_invariant(Invariant inv, const AuthorizationState& state);

struct VerifyParams {
  Invariant invariant = Invariant::Connectivity;
  VerifyMode mode = VerifyMode::Exhaustive;
  std::size_t n = 3;
  std::size_t depth = 3;     // exhaustive bound, or longest random trace
  std::size_t samples = 0;   // random modes
  std::uint64_t seed = 0;    // random modes
  std::size_t state_cap = 1'000'000;
  // Exhaustive mode only: explore from here instead of the empty state.
  std::optional<AuthorizationState> start;
};

struct Witness {
  AuthorizationState state;
  Action action;
  Violation violation;
  // Actions leading from the empty state to `state`, when known.
  std::vector<Action> trace;
};

struct InvariantReport {
  VerifyParams params;
  bool holds = true;
  std::optional<Witness> witness;
  std::size_t states_checked = 0;
  std::size_t steps_checked = 0;
  // Random-arbitrary mode: sampled states rejected for failing the invariant.
  std::size_t states_rejected = 0;
  // Random-arbitrary mode: steps whose well-founded model was partial. Such
  // states are outside the reachable space the engine guarantees.
  std::size_t non_total_steps = 0;
};

class ResourceBoundExceeded : public std::runtime_error {
 public:
  explicit ResourceBoundExceeded(std::size_t cap)
      : std::runtime_error("resource-bound-exceeded: more than " + std::to_string(cap) +
                           " states"),
        cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// Parallel over states when built with OpenMP. The reported counterexample is
// the first in the serial visiting order, so both versions agree exactly.
InvariantReport verify_step_invariant(const VerifyParams& params);
InvariantReport verify_step_invariant_serial(const VerifyParams& params);

// Seed of random sample k; shared with tests that replay samples.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t k);

// Arbitrary (not necessarily reachable) structurally valid state over A, B, ...
AuthorizationState random_arbitrary_state(std::uint64_t seed, std::size_t n);

}  // namespace deleg
