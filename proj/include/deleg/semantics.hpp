#pragma once

// Derived predicates over one authorization state: rooted delegation chains,
// grant capability, independence and access right. Each is a least fixpoint
// over (principal, permission) pairs; no path enumeration.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deleg/permission.hpp"
#include "deleg/state.hpp"

namespace deleg {

enum class ChainMode { All, ActiveOnly };

class UnknownPrincipal : public std::invalid_argument {
 public:
  explicit UnknownPrincipal(const std::string& name)
      : std::invalid_argument("unknown principal: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Bit i of a PermissionSet stands for the permission with index i.
using PermissionSet = std::uint8_t;

constexpr PermissionSet bit(Permission p) { return static_cast<PermissionSet>(1u << index_of(p)); }
constexpr bool contains(PermissionSet s, Permission p) { return (s & bit(p)) != 0; }

// p together with every permission p is stronger than.
constexpr PermissionSet downward_closure(Permission p) {
  PermissionSet s = bit(p);
  for (Permission q : kAllPermissions) {
    if (stronger(p, q)) s |= bit(q);
  }
  return s;
}

// Permissions grantable by someone holding every permission in `held`.
constexpr PermissionSet grantable_from(PermissionSet held) {
  PermissionSet s = 0;
  for (Permission h : kAllPermissions) {
    if (!contains(held, h)) continue;
    for (Permission g : kAllPermissions) {
      if (r_pos(h, g)) s |= bit(g);
    }
  }
  return s;
}

constexpr bool negative_issuable_from(PermissionSet held) {
  for (Permission h : kAllPermissions) {
    if (contains(held, h) && can_issue_negative(h)) return true;
  }
  return false;
}

// The permissions in `candidates` that no other candidate is stronger than.
// For the down-closed sets produced by chains this is at most one element.
PermissionSet strongest_of(PermissionSet candidates);

// Result of the chain fixpoint: which permissions each principal holds.
class ChainTable {
 public:
  ChainTable() = default;
  explicit ChainTable(std::size_t principals) : held_(principals, 0) {}

  std::size_t size() const { return held_.size(); }
  PermissionSet held(std::size_t p) const { return held_[p]; }
  bool holds(std::size_t p, Permission perm) const { return contains(held_[p], perm); }
  bool holds_any(std::size_t p) const { return held_[p] != 0; }
  PermissionSet grantable(std::size_t p) const { return grantable_from(held_[p]); }
  bool can_grant(std::size_t p, Permission perm) const { return contains(grantable(p), perm); }
  bool can_issue_negative(std::size_t p) const { return negative_issuable_from(held_[p]); }

  // Returns true if the set grew.
  bool add(std::size_t p, PermissionSet s) {
    PermissionSet before = held_[p];
    held_[p] = static_cast<PermissionSet>(before | s);
    return held_[p] != before;
  }

  friend bool operator==(const ChainTable&, const ChainTable&) = default;

 private:
  std::vector<PermissionSet> held_;
};

// Least fixpoint of: the SOA holds TT; if q holds pi and an edge (q,p,pi')
// with R(pi,pi') counts, p holds pi'; holding pi implies holding every weaker
// permission. In ActiveOnly mode only active edges count.
ChainTable least_chains(std::size_t principals, std::size_t soa,
                        std::span<const IndexedState::Edge> edges, ChainMode mode);

ChainTable least_chains(const IndexedState& state, ChainMode mode);

// ind(x, excluded, a) per principal x, as a PermissionSet over a. The SOA is
// independent of every other principal for every permission; otherwise x is
// independent with respect to a when an edge (p, x, a) with a in {TT, TF}
// leaves a principal p independent with respect to some a1 with R(a1, a).
// Inactive edges count.
std::vector<PermissionSet> independence_from(const IndexedState& state, std::size_t excluded);

// ∃a1: ind(x, excluded, a1) ∧ R(a1, a), as a PermissionSet over a.
std::vector<PermissionSet> independent_grant_rights(const IndexedState& state, std::size_t excluded);

// Everything the query layer needs about one state, computed once.
struct Analysis {
  explicit Analysis(const AuthorizationState& state);

  IndexedState indexed;
  ChainTable chains;
  ChainTable active_chains;
  std::vector<char> access;

  const ChainTable& table(ChainMode mode) const {
    return mode == ChainMode::All ? chains : active_chains;
  }
};

// Name-based queries. Each throws UnknownPrincipal for names not in the state.
bool holds_chain(const AuthorizationState& state, std::string_view principal, Permission perm,
                 ChainMode mode);
bool can_grant(const AuthorizationState& state, std::string_view principal, Permission perm,
               ChainMode mode);
bool can_issue_neg_auth(const AuthorizationState& state, std::string_view principal, ChainMode mode);
// Does j have a rooted chain w.r.t. perm avoiding i (TT/TF edges only)?
bool independent(const AuthorizationState& state, std::string_view j, std::string_view i,
                 Permission perm);
bool access_right(const AuthorizationState& state, std::string_view principal);

// Sorted principal names.
std::vector<std::string> query_access(const AuthorizationState& state);
std::vector<std::string> query_holders(const AuthorizationState& state, Permission perm,
                                       ChainMode mode);

}  // namespace deleg
