#include "deleg/verifier.hpp"

#include <exception>
#include <random>
#include <unordered_set>

#include "deleg/oracle.hpp"
#include "deleg/semantics.hpp"
#include "deleg/transition.hpp"

namespace deleg {

std::string_view to_string(Invariant inv) {
  return inv == Invariant::Connectivity ? "connectivity" : "active-connectivity";
}

std::string_view to_string(VerifyMode mode) {
  switch (mode) {
    case VerifyMode::Exhaustive: return "exhaustive";
    case VerifyMode::Random: return "random";
    case VerifyMode::RandomArbitrary: return "random-arbitrary";
  }
  return "unknown";
}

std::optional<Invariant> parse_invariant(std::string_view text) {
  if (text == "connectivity") return Invariant::Connectivity;
  if (text == "active-connectivity") return Invariant::ActiveConnectivity;
  return std::nullopt;
}

std::string to_string(const Violation& v) {
  if (!v.permission) return "neg " + v.grantor + " " + v.grantee;
  return "auth " + v.grantor + " " + v.grantee + " " + std::string(to_string(*v.permission));
}

namespace {

std::vector<Violation> check(const AuthorizationState& state, bool active_only) {
  IndexedState indexed(state);
  auto table = least_chains(indexed, active_only ? ChainMode::ActiveOnly : ChainMode::All);
  std::vector<Violation> out;
  for (const auto& e : indexed.edges()) {
    if (active_only && !e.active) continue;
    if (!table.can_grant(e.from, e.permission)) {
      out.push_back({indexed.name(e.from), indexed.name(e.to), e.permission});
    }
  }
  // Active-connectivity quantifies over positive authorizations only.
  if (active_only) return out;
  for (const auto& [from, to] : indexed.negatives()) {
    if (!table.can_issue_negative(from)) {
      out.push_back({indexed.name(from), indexed.name(to), std::nullopt});
    }
  }
  return out;
}

// Compact canonical encoding for deduplication. States in one run share a
// principal set, so indices suffice.
std::string state_key(const AuthorizationState& s) {
  std::string key;
  key.reserve(s.positive().size() * 4 + s.negative().size() * 2 + 1);
  for (const auto& a : s.positive()) {
    key.push_back(static_cast<char>(*s.principal_index(a.grantor)));
    key.push_back(static_cast<char>(*s.principal_index(a.grantee)));
    key.push_back(static_cast<char>(index_of(a.permission)));
    key.push_back(a.active ? 'a' : 'i');
  }
  key.push_back('|');
  for (const auto& n : s.negative()) {
    key.push_back(static_cast<char>(*s.principal_index(n.grantor)));
    key.push_back(static_cast<char>(*s.principal_index(n.grantee)));
  }
  return key;
}

struct StateCheck {
  std::optional<std::pair<Action, Violation>> bad;
  std::vector<std::pair<Action, AuthorizationState>> successors;
  std::size_t steps = 0;
  std::size_t non_total = 0;
  std::exception_ptr error;
};

// Applies every valid action to `state` and checks the invariant afterwards.
StateCheck check_state(const AuthorizationState& state, Invariant inv, bool collect,
                       bool tolerate_non_total) {
  StateCheck out;
  try {
    for (const auto& action : valid_actions(state)) {
      AuthorizationState post;
      try {
        post = apply_action(state, action).state;
      } catch (const NonTotalModel&) {
        if (!tolerate_non_total) throw;
        ++out.non_total;
        continue;
      }
      ++out.steps;
      auto violations = check_invariant(inv, post);
      if (!violations.empty()) {
        out.bad = {action, violations.front()};
        return out;
      }
      if (collect) out.successors.emplace_back(action, std::move(post));
    }
  } catch (...) {
    out.error = std::current_exception();
  }
  return out;
}

struct Node {
  AuthorizationState state;
  std::size_t parent;
  Action action;
};

std::vector<Action> trace_of(const std::vector<Node>& nodes, std::size_t at) {
  std::vector<Action> trace;
  while (at != 0) {
    trace.push_back(nodes[at].action);
    at = nodes[at].parent;
  }
  return {trace.rbegin(), trace.rend()};
}

InvariantReport run_exhaustive(const VerifyParams& params, [[maybe_unused]] bool parallel) {
  InvariantReport report;
  report.params = params;
  const bool from_empty = !params.start;
  std::vector<Node> nodes{{params.start ? *params.start : empty_state(params.n), 0, {}}};
  std::unordered_set<std::string> seen{state_key(nodes.front().state)};

  std::size_t begin = 0;
  for (std::size_t d = 0; d <= params.depth && begin < nodes.size(); ++d) {
    const std::size_t end = nodes.size();
    const bool expand = d < params.depth;
    std::vector<StateCheck> results(end - begin);
    const auto count = static_cast<std::ptrdiff_t>(end - begin);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      results[k] = check_state(nodes[begin + k].state, params.invariant, expand, false);
    }
    for (std::size_t k = 0; k < results.size(); ++k) {
      auto& r = results[k];
      if (r.error) std::rethrow_exception(r.error);
      report.states_checked += 1;
      report.steps_checked += r.steps;
      if (r.bad) {
        report.holds = false;
        auto trace = from_empty ? trace_of(nodes, begin + k) : std::vector<Action>{};
        report.witness = Witness{nodes[begin + k].state, r.bad->first, r.bad->second, trace};
        return report;
      }
      for (auto& [action, post] : r.successors) {
        if (!seen.insert(state_key(post)).second) continue;
        if (nodes.size() >= params.state_cap) throw ResourceBoundExceeded(params.state_cap);
        nodes.push_back({std::move(post), begin + k, std::move(action)});
      }
    }
    begin = end;
  }
  return report;
}

InvariantReport run_random(const VerifyParams& params, [[maybe_unused]] bool parallel) {
  InvariantReport report;
  report.params = params;
  const bool arbitrary = params.mode == VerifyMode::RandomArbitrary;
  struct Sample {
    AuthorizationState state;
    std::vector<Action> trace;
    bool rejected = false;
    StateCheck result;
  };
  std::vector<Sample> samples(params.samples);
  const auto count = static_cast<std::ptrdiff_t>(params.samples);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    auto& s = samples[k];
    const auto seed = sample_seed(params.seed, static_cast<std::size_t>(k));
    try {
      if (arbitrary) {
        s.state = random_arbitrary_state(seed, params.n);
        if (!check_invariant(params.invariant, s.state).empty()) {
          s.rejected = true;
          continue;
        }
      } else {
        // Vary trace length so shallow states are sampled too.
        const std::size_t depth =
            params.depth == 0 ? 0 : 1 + static_cast<std::size_t>(k) % params.depth;
        auto sample = random_reachable_state(seed, params.n, depth);
        s.state = std::move(sample.state);
        s.trace = std::move(sample.trace);
      }
    } catch (...) {
      s.result.error = std::current_exception();
      continue;
    }
    s.result = check_state(s.state, params.invariant, false, arbitrary);
  }
  for (auto& s : samples) {
    if (s.rejected) {
      ++report.states_rejected;
      continue;
    }
    if (s.result.error) std::rethrow_exception(s.result.error);
    report.states_checked += 1;
    report.steps_checked += s.result.steps;
    report.non_total_steps += s.result.non_total;
    if (s.result.bad) {
      report.holds = false;
      report.witness = Witness{s.state, s.result.bad->first, s.result.bad->second, s.trace};
      return report;
    }
  }
  return report;
}

InvariantReport run(const VerifyParams& params, bool parallel) {
  if (params.mode == VerifyMode::Exhaustive) return run_exhaustive(params, parallel);
  return run_random(params, parallel);
}

}  // namespace

std::vector<Violation> check_connectivity(const AuthorizationState& state) {
  return check(state, false);
}

std::vector<Violation> check_active_connectivity(const AuthorizationState& state) {
  return check(state, true);
}

std::vector<Violation> check_invariant(Invariant inv, const AuthorizationState& state) {
  return inv == Invariant::Connectivity ? check_connectivity(state)
                                        : check_active_connectivity(state);
}

InvariantReport verify_step_invariant(const VerifyParams& params) { return run(params, true); }

InvariantReport verify_step_invariant_serial(const VerifyParams& params) {
  return run(params, false);
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t k) {
  // splitmix64 finalizer over (seed, k)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(k) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

AuthorizationState random_arbitrary_state(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(0.12), active(0.85), negative(0.08);
  auto base = empty_state(n);
  const auto& names = base.principals();
  std::vector<Authorization> pos;
  std::vector<NegativeAuthorization> neg;
  for (const auto& g : names) {
    for (const auto& e : names) {
      if (g == e) continue;
      for (Permission p : kAllPermissions) {
        if (edge(rng)) pos.push_back({g, e, p, active(rng)});
      }
      if (negative(rng)) neg.push_back({g, e});
    }
  }
  return AuthorizationState(base.soa(), names, std::move(pos), std::move(neg));
}

}  // namespace deleg
