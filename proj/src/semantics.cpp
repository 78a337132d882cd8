#include "deleg/semantics.hpp"

namespace deleg {

PermissionSet strongest_of(PermissionSet candidates) {
  PermissionSet out = 0;
  for (Permission p : kAllPermissions) {
    if (!contains(candidates, p)) continue;
    bool dominated = false;
    for (Permission q : kAllPermissions) {
      if (contains(candidates, q) && stronger(q, p)) dominated = true;
    }
    if (!dominated) out |= bit(p);
  }
  return out;
}

ChainTable least_chains(std::size_t principals, std::size_t soa,
                        std::span<const IndexedState::Edge> edges, ChainMode mode) {
  ChainTable table(principals);
  if (principals == 0) return table;
  table.add(soa, downward_closure(Permission::TT));
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      if (mode == ChainMode::ActiveOnly && !e.active) continue;
      if (table.can_grant(e.from, e.permission)) {
        changed |= table.add(e.to, downward_closure(e.permission));
      }
    }
  }
  return table;
}

ChainTable least_chains(const IndexedState& state, ChainMode mode) {
  return least_chains(state.size(), state.soa(), state.edges(), mode);
}

std::vector<PermissionSet> independence_from(const IndexedState& state, std::size_t excluded) {
  std::vector<PermissionSet> ind(state.size(), 0);
  if (state.soa() != excluded) ind[state.soa()] = 0xF;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : state.edges()) {
      if (e.to == excluded) continue;
      if (e.permission != Permission::TT && e.permission != Permission::TF) continue;
      if (!contains(grantable_from(ind[e.from]), e.permission)) continue;
      auto before = ind[e.to];
      ind[e.to] = static_cast<PermissionSet>(before | bit(e.permission));
      changed |= ind[e.to] != before;
    }
  }
  return ind;
}

std::vector<PermissionSet> independent_grant_rights(const IndexedState& state,
                                                    std::size_t excluded) {
  auto ind = independence_from(state, excluded);
  for (auto& s : ind) s = grantable_from(s);
  return ind;
}

Analysis::Analysis(const AuthorizationState& state)
    : indexed(state),
      chains(least_chains(indexed, ChainMode::All)),
      active_chains(least_chains(indexed, ChainMode::ActiveOnly)),
      access(indexed.size(), 0) {
  for (std::size_t p = 0; p < indexed.size(); ++p) {
    if (active_chains.holds_any(p)) access[p] = 1;
  }
  // Second clause: an active edge from someone who can actively grant it.
  for (const auto& e : indexed.edges()) {
    if (e.active && active_chains.can_grant(e.from, e.permission)) access[e.to] = 1;
  }
}

namespace {

std::size_t require(const AuthorizationState& state, std::string_view name) {
  auto idx = state.principal_index(name);
  if (!idx) throw UnknownPrincipal(std::string(name));
  return *idx;
}

}  // namespace

bool holds_chain(const AuthorizationState& state, std::string_view principal, Permission perm,
                 ChainMode mode) {
  auto p = require(state, principal);
  return least_chains(IndexedState(state), mode).holds(p, perm);
}

bool can_grant(const AuthorizationState& state, std::string_view principal, Permission perm,
               ChainMode mode) {
  auto p = require(state, principal);
  return least_chains(IndexedState(state), mode).can_grant(p, perm);
}

bool can_issue_neg_auth(const AuthorizationState& state, std::string_view principal,
                        ChainMode mode) {
  auto p = require(state, principal);
  return least_chains(IndexedState(state), mode).can_issue_negative(p);
}

bool independent(const AuthorizationState& state, std::string_view j, std::string_view i,
                 Permission perm) {
  auto jj = require(state, j);
  auto ii = require(state, i);
  return contains(independence_from(IndexedState(state), ii)[jj], perm);
}

bool access_right(const AuthorizationState& state, std::string_view principal) {
  auto p = require(state, principal);
  return Analysis(state).access[p] != 0;
}

std::vector<std::string> query_access(const AuthorizationState& state) {
  Analysis analysis(state);
  std::vector<std::string> out;
  for (std::size_t p = 0; p < analysis.indexed.size(); ++p) {
    if (analysis.access[p]) out.push_back(analysis.indexed.name(p));
  }
  return out;
}

std::vector<std::string> query_holders(const AuthorizationState& state, Permission perm,
                                       ChainMode mode) {
  IndexedState indexed(state);
  auto table = least_chains(indexed, mode);
  std::vector<std::string> out;
  for (std::size_t p = 0; p < indexed.size(); ++p) {
    if (table.holds(p, perm)) out.push_back(indexed.name(p));
  }
  return out;
}

}  // namespace deleg
