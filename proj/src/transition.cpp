#include "deleg/transition.hpp"

#include <algorithm>
#include <cassert>

#include "deleg/semantics.hpp"

namespace deleg {

std::string_view to_string(ActionErrorCode code) {
  switch (code) {
    case ActionErrorCode::UnknownPrincipal: return "unknown-principal";
    case ActionErrorCode::SelfTarget: return "self-target";
    case ActionErrorCode::UnauthorizedGrant: return "unauthorized-grant";
    case ActionErrorCode::GrantShadowed: return "grant-shadowed";
    case ActionErrorCode::NoAuthorizationToRevoke: return "no-authorization-to-revoke";
    case ActionErrorCode::UnauthorizedNegative: return "unauthorized-negative";
  }
  return "action-error";
}

ActionError::ActionError(ActionErrorCode code, const Action& action)
    : std::runtime_error(std::string(to_string(code)) + ": " + to_string(action)),
      code_(code),
      action_(action) {}

NonTotalModel::NonTotalModel(const Action& action, std::size_t undefined_atoms)
    : std::runtime_error("non-total-model: " + std::to_string(undefined_atoms) +
                         " undefined atoms after " + to_string(action)),
      undefined_(undefined_atoms) {}

SimulationError::SimulationError(std::size_t step, ActionErrorCode code, const Action& action)
    : std::runtime_error("step " + std::to_string(step) + ": " + std::string(to_string(code)) +
                         ": " + to_string(action)),
      step_(step),
      code_(code) {}

namespace {

constexpr PermissionSet weaker_than(Permission p) {
  return static_cast<PermissionSet>(downward_closure(p) & ~bit(p));
}

// Strongest permission a grant scheme yields for someone who can actively
// grant `grantable`.
std::optional<Permission> grant_result(Scheme scheme, PermissionSet grantable) {
  PermissionSet compatible = 0;
  for (Permission p : kAllPermissions) {
    if (contains(grantable, p) && grant_compat(p, scheme)) compatible |= bit(p);
  }
  PermissionSet best = strongest_of(compatible);
  for (Permission p : kAllPermissions) {
    if (contains(best, p)) return p;
  }
  return std::nullopt;
}

// Atoms at t+1. Chain tables are derived atoms and take part in equality.
struct Interpretation {
  std::vector<char> deleted;
  std::vector<char> added;
  std::vector<char> present;
  std::vector<char> inactive;
  ChainTable chains;
  ChainTable active_chains;

  friend bool operator==(const Interpretation&, const Interpretation&) = default;
};

class StepSolver {
 public:
  StepSolver(const IndexedState& pre, Scheme scheme, std::size_t actor, std::size_t target)
      : pre_(pre),
        scheme_(scheme),
        actor_(actor),
        target_(target),
        n_(pre.size()),
        slots_(pre.slot_count()),
        chains0_(least_chains(pre, ChainMode::All)),
        active0_(least_chains(pre, ChainMode::ActiveOnly)),
        fixed_deleted_(slots_, 0),
        fixed_added_(slots_, 0),
        fixed_inactive_(slots_, 0),
        handled_(slots_, 0),
        triggered_(n_, 0) {
    if (is_strong(scheme_)) independent_rights_ = independent_grant_rights(pre_, actor_);
    seed_direct_facts();
    if (is_local(scheme_)) seed_local_facts();
  }

  // Well-founded model by alternating fixpoint; nullopt if not total. The
  // strong global recursion runs as an outer loop: a principal that lost an
  // incoming authorization in the current model has the non-independent
  // authorizations into it removed as fixed facts, and the model is solved
  // again. Letting the trigger take part in the fixpoint instead lets a loss
  // justify itself around a cycle through two negations, which leaves the
  // model partial.
  std::optional<Interpretation> solve(std::size_t& undefined) {
    while (true) {
      auto model = well_founded(undefined);
      if (!model || !fire_triggers(*model)) return model;
    }
  }

 private:
  bool independent_right(std::size_t z, Permission a) const {
    return contains(independent_rights_[z], a);
  }

  std::optional<Interpretation> well_founded(std::size_t& undefined) const {
    Interpretation lower = bottom();
    Interpretation upper = gamma(lower);
    while (true) {
      Interpretation next_lower = gamma(upper);
      Interpretation next_upper = gamma(next_lower);
      bool stable = next_lower == lower && next_upper == upper;
      lower = std::move(next_lower);
      upper = std::move(next_upper);
      if (stable) break;
    }
    undefined = count_differences(lower, upper);
    if (undefined != 0) return std::nullopt;
    return upper;
  }

  // Returns whether any new fact was added.
  bool fire_triggers(const Interpretation& model) {
    if (scheme_ != Scheme::SGD && scheme_ != Scheme::SGN) return false;
    const bool del = scheme_ == Scheme::SGD;
    auto& facts = del ? fixed_deleted_ : fixed_inactive_;
    bool fired = false;
    for (std::size_t w = 0; w < n_; ++w) {
      if (triggered_[w]) continue;
      if (del ? !has_into(model.deleted, w) : !has_newly_inactive_into(model.inactive, w)) continue;
      triggered_[w] = 1;
      for (const auto& e : pre_.edges()) {
        if (e.to != w || independent_right(e.from, e.permission)) continue;
        auto s = pre_.slot(e.from, e.to, e.permission);
        if (!facts[s]) {
          facts[s] = 1;
          fired = true;
        }
      }
    }
    return fired;
  }

  // Facts that depend only on time t and the action.
  void seed_direct_facts() {
    if (is_grant(scheme_)) {
      auto a = grant_result(scheme_, active0_.grantable(actor_));
      assert(a);
      fixed_added_[pre_.slot(actor_, target_, *a)] = 1;
      return;
    }
    for (const auto& e : pre_.edges()) {
      auto s = pre_.slot(e.from, e.to, e.permission);
      // Revoked edge.
      if (is_delete(scheme_) && e.from == actor_ && e.to == target_) fixed_deleted_[s] = 1;
      // Strong dominance at the target: edges into j from grantors not
      // independent of the revoker.
      const bool strong_at_target =
          scheme_ == Scheme::SLD || scheme_ == Scheme::SLN || scheme_ == Scheme::SGN;
      if (strong_at_target && e.to == target_ && !independent_right(e.from, e.permission)) {
        if (scheme_ == Scheme::SLD) {
          fixed_deleted_[s] = 1;
        } else {
          fixed_inactive_[s] = 1;
        }
      }
    }
  }

  // Local schemes: the target's losses are judged right after the direct
  // removals, then its ungrantable edges are removed, replaced by the
  // strongest weaker grant and forwarded to the revoker.
  void seed_local_facts() {
    std::vector<IndexedState::Edge> mid;
    for (const auto& e : pre_.edges()) {
      auto s = pre_.slot(e.from, e.to, e.permission);
      if (fixed_deleted_[s]) continue;
      auto copy = e;
      if (fixed_inactive_[s]) copy.active = false;
      if (is_negative(scheme_) && e.from == actor_ && e.to == target_) copy.active = false;
      mid.push_back(copy);
    }
    auto chains_mid = least_chains(n_, pre_.soa(), mid, ChainMode::All);
    auto active_mid = least_chains(n_, pre_.soa(), mid, ChainMode::ActiveOnly);

    const std::size_t j = target_;
    for (const auto& e : pre_.edges()) {
      if (e.from != j) continue;
      auto s = pre_.slot(e.from, e.to, e.permission);
      const Permission a = e.permission;
      const bool lost = is_delete(scheme_) && !chains_mid.can_grant(j, a);
      const bool lost_active = !active_mid.can_grant(j, a);
      if (!lost && !lost_active) continue;
      handled_[s] = 1;
      if (lost) {
        fixed_deleted_[s] = 1;
        add_strongest(j, e.to, chains_mid.grantable(j) & weaker_than(a));
      } else {
        fixed_inactive_[s] = 1;
        if (is_negative(scheme_) && active0_.can_grant(j, a)) {
          add_strongest(j, e.to, active_mid.grantable(j) & weaker_than(a));
        }
      }
      if (active0_.can_grant(j, a) && e.to != actor_) {
        fixed_added_[pre_.slot(actor_, e.to, a)] = 1;
      }
    }
  }

  void add_strongest(std::size_t from, std::size_t to, PermissionSet candidates) {
    PermissionSet best = strongest_of(candidates);
    for (Permission p : kAllPermissions) {
      if (contains(best, p)) fixed_added_[pre_.slot(from, to, p)] = 1;
    }
  }

  Interpretation bottom() const {
    return Interpretation{std::vector<char>(slots_, 0), std::vector<char>(slots_, 0),
                          std::vector<char>(slots_, 0), std::vector<char>(slots_, 0),
                          ChainTable(n_), ChainTable(n_)};
  }

  // Least model of the rules with every negative literal read from `neg`.
  Interpretation gamma(const Interpretation& neg) const {
    Interpretation cur{fixed_deleted_, fixed_added_, std::vector<char>(slots_, 0),
                       fixed_inactive_, ChainTable(n_), ChainTable(n_)};
    const bool negative_scheme = is_negative(scheme_);
    std::vector<IndexedState::Edge> edges1;
    edges1.reserve(pre_.edges().size() + 8);

    bool changed = true;
    while (changed) {
      changed = false;
      auto set = [&changed](std::vector<char>& v, std::size_t s) {
        if (!v[s]) {
          v[s] = 1;
          changed = true;
        }
      };

      // Cascade: a grantor that can no longer grant loses the edge (inactive
      // chains still count, so this uses the All-mode table).
      for (const auto& e : pre_.edges()) {
        if (!neg.chains.can_grant(e.from, e.permission)) {
          set(cur.deleted, pre_.slot(e.from, e.to, e.permission));
        }
      }

      // Downgrade replacement for edges whose grantor lost the right to
      // grant them: strongest weaker permission it can still grant. Both the
      // loss and the fallback are read from `neg`; they describe one grantable
      // set, and splitting them across interpretations leaves cycles through
      // a revoker-dominated grantor undefined.
      for (const auto& e : pre_.edges()) {
        auto s = pre_.slot(e.from, e.to, e.permission);
        if (handled_[s]) continue;
        if (!neg.chains.can_grant(e.from, e.permission)) {
          add_replacement(cur, e, neg.chains.grantable(e.from), changed);
        }
        if (negative_scheme && active0_.can_grant(e.from, e.permission) &&
            !neg.active_chains.can_grant(e.from, e.permission)) {
          add_replacement(cur, e, neg.active_chains.grantable(e.from), changed);
        }
      }

      // pos_perm at t+1.
      edges1.clear();
      for (std::size_t from = 0; from < n_; ++from) {
        for (std::size_t to = 0; to < n_; ++to) {
          for (Permission p : kAllPermissions) {
            auto s = pre_.slot(from, to, p);
            bool present = (pre_.present(s) && !neg.deleted[s]) || cur.added[s];
            if (!present) continue;
            set(cur.present, s);
            edges1.push_back({static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(to), p,
                              !neg.inactive[s]});
          }
        }
      }
      auto chains = least_chains(n_, pre_.soa(), edges1, ChainMode::All);
      auto active = least_chains(n_, pre_.soa(), edges1, ChainMode::ActiveOnly);
      if (!(chains == cur.chains) || !(active == cur.active_chains)) {
        cur.chains = std::move(chains);
        cur.active_chains = std::move(active);
        changed = true;
      }

      // inactive at t+1.
      for (const auto& e : edges1) {
        auto s = pre_.slot(e.from, e.to, e.permission);
        if (negative_scheme && e.from == actor_ && e.to == target_) set(cur.inactive, s);
        if (!neg.active_chains.can_grant(e.from, e.permission)) set(cur.inactive, s);
        if (pre_.present(s) && pre_.inactive(s)) set(cur.inactive, s);
      }
    }
    return cur;
  }

  // new(x,k,a1) <- pos(t,x,k,a) & ~grant(x,a) & grant(x,a1) & Stronger(a,a1)
  //               & ~?a2: grant(x,a2) & Stronger(a,a2) & Stronger(a2,a1)
  void add_replacement(Interpretation& cur, const IndexedState::Edge& e, PermissionSet grantable,
                       bool& changed) const {
    const Permission a = e.permission;
    for (Permission a1 : kAllPermissions) {
      if (!contains(grantable, a1) || !stronger(a, a1)) continue;
      bool beaten = false;
      for (Permission a2 : kAllPermissions) {
        if (contains(grantable, a2) && stronger(a, a2) && stronger(a2, a1)) beaten = true;
      }
      if (beaten) continue;
      auto s = pre_.slot(e.from, e.to, a1);
      if (!cur.added[s]) {
        cur.added[s] = 1;
        changed = true;
      }
    }
  }

  bool has_into(const std::vector<char>& atoms, std::size_t w) const {
    for (std::size_t from = 0; from < n_; ++from) {
      for (Permission p : kAllPermissions) {
        if (atoms[pre_.slot(from, w, p)]) return true;
      }
    }
    return false;
  }

  bool has_newly_inactive_into(const std::vector<char>& inactive, std::size_t w) const {
    for (std::size_t from = 0; from < n_; ++from) {
      for (Permission p : kAllPermissions) {
        auto s = pre_.slot(from, w, p);
        if (inactive[s] && !(pre_.present(s) && pre_.inactive(s))) return true;
      }
    }
    return false;
  }

  std::size_t count_differences(const Interpretation& a, const Interpretation& b) const {
    std::size_t diff = 0;
    for (std::size_t s = 0; s < slots_; ++s) {
      diff += a.deleted[s] != b.deleted[s];
      diff += a.added[s] != b.added[s];
      diff += a.present[s] != b.present[s];
      diff += a.inactive[s] != b.inactive[s];
    }
    for (std::size_t p = 0; p < n_; ++p) {
      diff += a.chains.held(p) != b.chains.held(p);
      diff += a.active_chains.held(p) != b.active_chains.held(p);
    }
    return diff;
  }

  const IndexedState& pre_;
  Scheme scheme_;
  std::size_t actor_;
  std::size_t target_;
  std::size_t n_;
  std::size_t slots_;
  ChainTable chains0_;
  ChainTable active0_;
  std::vector<PermissionSet> independent_rights_;
  std::vector<char> fixed_deleted_;
  std::vector<char> fixed_added_;
  std::vector<char> fixed_inactive_;
  // Target edges already settled by the local step.
  std::vector<char> handled_;
  // Principals the strong global recursion has already fired at.
  std::vector<char> triggered_;
};

}  // namespace

namespace {

// Shared by validate_action and valid_actions; `active` is the ACTIVE_ONLY
// chain table of `state`.
std::optional<ActionErrorCode> validate_with(const AuthorizationState& state,
                                             const ChainTable& active, std::size_t actor,
                                             std::size_t target, const Action& action) {
  if (actor == target) return ActionErrorCode::SelfTarget;
  if (is_grant(action.scheme)) {
    auto a = grant_result(action.scheme, active.grantable(actor));
    if (!a) return ActionErrorCode::UnauthorizedGrant;
    const auto* existing = state.find_positive(action.actor, action.target, *a);
    if (existing && !existing->active) return ActionErrorCode::GrantShadowed;
    return std::nullopt;
  }
  if (is_delete(action.scheme)) {
    if (!state.has_positive_between(action.actor, action.target)) {
      return ActionErrorCode::NoAuthorizationToRevoke;
    }
    return std::nullopt;
  }
  if (!active.can_issue_negative(actor)) return ActionErrorCode::UnauthorizedNegative;
  return std::nullopt;
}

}  // namespace

std::optional<ActionErrorCode> validate_action(const AuthorizationState& state,
                                               const Action& action) {
  auto actor = state.principal_index(action.actor);
  auto target = state.principal_index(action.target);
  if (!actor || !target) return ActionErrorCode::UnknownPrincipal;
  if (*actor == *target) return ActionErrorCode::SelfTarget;
  auto active = least_chains(IndexedState(state), ChainMode::ActiveOnly);
  return validate_with(state, active, *actor, *target, action);
}

StepResult apply_action(const AuthorizationState& state, const Action& action) {
  if (auto error = validate_action(state, action)) throw ActionError(*error, action);

  IndexedState pre(state);
  const std::size_t actor = *state.principal_index(action.actor);
  const std::size_t target = *state.principal_index(action.target);
  StepSolver solver(pre, action.scheme, actor, target);
  std::size_t undefined = 0;
  auto model = solver.solve(undefined);
  if (!model) throw NonTotalModel(action, undefined);

  const std::size_t n = pre.size();
  std::vector<Authorization> positive;
  StepDelta delta;
  for (std::size_t from = 0; from < n; ++from) {
    for (std::size_t to = 0; to < n; ++to) {
      for (Permission p : kAllPermissions) {
        auto s = pre.slot(from, to, p);
        Triple triple{pre.name(from), pre.name(to), p};
        const bool survived = pre.present(s) && !model->deleted[s];
        if (pre.present(s) && model->deleted[s]) delta.deleted.push_back(triple);
        if (model->added[s] && !survived) delta.added.push_back(triple);
        if (!model->present[s]) continue;
        const bool inactive = model->inactive[s] != 0;
        if (inactive && !(pre.present(s) && pre.inactive(s))) delta.inactivated.push_back(triple);
        positive.push_back({pre.name(from), pre.name(to), p, !inactive});
      }
    }
  }

  std::vector<NegativeAuthorization> negative = state.negative();
  if (is_negative(action.scheme) && !state.has_negative(action.actor, action.target)) {
    negative.push_back({action.actor, action.target});
    delta.neg_added.push_back({action.actor, action.target});
  }
  return {AuthorizationState(state.soa(), state.principals(), std::move(positive),
                             std::move(negative)),
          std::move(delta)};
}

SimulationResult simulate(const AuthorizationState& state, std::span<const Action> actions) {
  SimulationResult result;
  result.states.push_back(state);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (auto error = validate_action(result.states.back(), actions[k])) {
      throw SimulationError(k, *error, actions[k]);
    }
    auto step = apply_action(result.states.back(), actions[k]);
    result.states.push_back(std::move(step.state));
    result.deltas.push_back(std::move(step.delta));
  }
  return result;
}

std::vector<Action> valid_actions(const AuthorizationState& state) {
  std::vector<Action> out;
  const auto& names = state.principals();
  const auto active = least_chains(IndexedState(state), ChainMode::ActiveOnly);
  for (std::size_t actor = 0; actor < names.size(); ++actor) {
    for (Scheme scheme : kAllSchemes) {
      for (std::size_t target = 0; target < names.size(); ++target) {
        if (actor == target) continue;
        Action action{scheme, names[actor], names[target]};
        if (!validate_with(state, active, actor, target, action)) out.push_back(std::move(action));
      }
    }
  }
  return out;
}

}  // namespace deleg
