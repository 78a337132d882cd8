#include "deleg/planner.hpp"

#include <algorithm>
#include <exception>

#include "deleg/semantics.hpp"
#include "deleg/transition.hpp"

namespace deleg {

std::string to_string(const Literal& literal) {
  const std::string& p = literal.principal;
  const std::string perm{to_string(literal.permission)};
  switch (literal.kind) {
    case Literal::Kind::Access: return "access(" + p + ")";
    case Literal::Kind::NotAccess: return "!access(" + p + ")";
    case Literal::Kind::Holds: return "holds(" + p + "," + perm + ")";
    case Literal::Kind::NotHolds: return "!holds(" + p + "," + perm + ")";
    case Literal::Kind::Unchanged: return "unchanged(" + p + ")";
  }
  return "";
}

std::string to_string(const Goal& goal) {
  std::string out;
  for (const auto& literal : goal.literals) {
    if (!out.empty()) out += " & ";
    out += to_string(literal);
  }
  return out;
}

void check_goal(const AuthorizationState& state, const Goal& goal) {
  if (goal.literals.empty()) throw GoalError("empty goal");
  for (const auto& literal : goal.literals) {
    if (!state.has_principal(literal.principal)) {
      throw GoalError("unknown-principal-in-goal: " + literal.principal);
    }
  }
}

namespace {

struct Profile {
  explicit Profile(const AuthorizationState& s) : analysis(s) {}
  Analysis analysis;

  PermissionSet held(std::size_t p) const { return analysis.active_chains.held(p); }
  bool access(std::size_t p) const { return analysis.access[p] != 0; }
};

bool eval(const AuthorizationState& state, const Profile& pre, const Profile& post,
          const Goal& goal) {
  for (const auto& literal : goal.literals) {
    const std::size_t p = *state.principal_index(literal.principal);
    bool ok = false;
    switch (literal.kind) {
      case Literal::Kind::Access: ok = post.access(p); break;
      case Literal::Kind::NotAccess: ok = !post.access(p); break;
      case Literal::Kind::Holds: ok = contains(post.held(p), literal.permission); break;
      case Literal::Kind::NotHolds: ok = !contains(post.held(p), literal.permission); break;
      case Literal::Kind::Unchanged:
        ok = pre.access(p) == post.access(p) && pre.held(p) == post.held(p);
        break;
    }
    if (!ok) return false;
  }
  return true;
}

std::size_t cost_of(const Profile& pre, const Profile& post) {
  std::size_t total = 0;
  for (std::size_t p = 0; p < pre.analysis.indexed.size(); ++p) {
    for (Permission perm : kAllPermissions) {
      total += contains(pre.held(p), perm) != contains(post.held(p), perm);
    }
    total += pre.access(p) != post.access(p);
  }
  return total;
}

std::vector<PlanResult> run(const AuthorizationState& state, const std::string& actor,
                            const Goal& goal, [[maybe_unused]] bool parallel) {
  if (!state.has_principal(actor)) throw UnknownPrincipal(actor);
  check_goal(state, goal);

  std::vector<Action> candidates;
  for (Scheme scheme : kAllSchemes) {
    for (const auto& target : state.principals()) {
      Action action{scheme, actor, target};
      if (!validate_action(state, action)) candidates.push_back(std::move(action));
    }
  }

  const Profile pre(state);
  std::vector<std::optional<PlanResult>> slots(candidates.size());
  std::vector<std::exception_ptr> errors(candidates.size());
  const auto count = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      auto post_state = apply_action(state, candidates[k]).state;
      const Profile post(post_state);
      if (eval(state, pre, post, goal)) {
        slots[k] = PlanResult{candidates[k], std::move(post_state), cost_of(pre, post)};
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }

  std::vector<PlanResult> out;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    if (slots[k]) out.push_back(std::move(*slots[k]));
  }
  // Candidates are already in (scheme, target) order.
  std::stable_sort(out.begin(), out.end(),
                   [](const PlanResult& a, const PlanResult& b) { return a.cost < b.cost; });
  return out;
}

}  // namespace

bool eval_goal(const AuthorizationState& pre, const AuthorizationState& post, const Goal& goal) {
  check_goal(pre, goal);
  return eval(pre, Profile(pre), Profile(post), goal);
}

std::size_t cost(const AuthorizationState& pre, const AuthorizationState& post) {
  return cost_of(Profile(pre), Profile(post));
}

std::vector<PlanResult> plan(const AuthorizationState& state, const std::string& actor,
                             const Goal& goal) {
  return run(state, actor, goal, true);
}

std::vector<PlanResult> plan_serial(const AuthorizationState& state, const std::string& actor,
                                    const Goal& goal) {
  return run(state, actor, goal, false);
}

std::optional<PlanResult> plan_min_cost(const AuthorizationState& state, const std::string& actor,
                                        const Goal& goal) {
  auto results = plan(state, actor, goal);
  if (results.empty()) return std::nullopt;
  return std::move(results.front());
}

}  // namespace deleg
