#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deleg/permission.hpp"

namespace deleg {

// A positive authorization (grantor, grantee, +, b1, b2) plus its activity
// flag. Identity is (grantor, grantee, permission); `active` is an attribute.
struct Authorization {
  std::string grantor;
  std::string grantee;
  Permission permission = Permission::FF;
  bool active = true;

  friend auto operator<=>(const Authorization&, const Authorization&) = default;
};

// (grantor, grantee, -, F, F). Always active.
struct NegativeAuthorization {
  std::string grantor;
  std::string grantee;

  friend auto operator<=>(const NegativeAuthorization&, const NegativeAuthorization&) = default;
};

struct Action {
  Scheme scheme = Scheme::GrantTT;
  std::string actor;
  std::string target;

  friend bool operator==(const Action&, const Action&) = default;
};

// "WLD A B"
std::string to_string(const Action& action);

// One time-slice of the authorization specification for a fixed (access, object)
// pair. Principals and authorizations are kept in canonical order so that
// equality is structural. Construction does not validate: a state read from
// untrusted input may violate the invariants and validate_state reports how.
class AuthorizationState {
 public:
  AuthorizationState() = default;
  AuthorizationState(std::string soa, std::vector<std::string> principals,
                     std::vector<Authorization> positive = {},
                     std::vector<NegativeAuthorization> negative = {});

  const std::string& soa() const { return soa_; }
  const std::vector<std::string>& principals() const { return principals_; }
  const std::vector<Authorization>& positive() const { return positive_; }
  const std::vector<NegativeAuthorization>& negative() const { return negative_; }

  bool has_principal(std::string_view name) const;
  std::optional<std::size_t> principal_index(std::string_view name) const;

  const Authorization* find_positive(std::string_view grantor, std::string_view grantee,
                                     Permission permission) const;
  bool has_positive_between(std::string_view grantor, std::string_view grantee) const;
  bool has_negative(std::string_view grantor, std::string_view grantee) const;

  bool has_inactive() const;

  friend bool operator==(const AuthorizationState&, const AuthorizationState&) = default;

 private:
  std::string soa_;
  std::vector<std::string> principals_;
  std::vector<Authorization> positive_;
  std::vector<NegativeAuthorization> negative_;
};

struct StructuralError {
  enum class Kind {
    EmptySoa,
    SoaNotPrincipal,
    InvalidName,
    DuplicatePrincipal,
    UnknownPrincipal,
    SelfAuthorization,
    DuplicatePositive,
    DuplicateNegative,
  };
  Kind kind;
  std::string detail;
};

std::string_view to_string(StructuralError::Kind kind);

// Every invariant violation of the state; empty means valid.
std::vector<StructuralError> validate_state(const AuthorizationState& state);

// Principal names are non-empty and contain no whitespace or control characters.
bool is_valid_principal_name(std::string_view name);

// Index-based view of a valid state. Principals are numbered in canonical
// (sorted) order; every (grantor, grantee, permission) triple has a dense slot.
class IndexedState {
 public:
  struct Edge {
    std::uint32_t from;
    std::uint32_t to;
    Permission permission;
    bool active;
  };

  // Requires validate_state(state) to be empty.
  explicit IndexedState(const AuthorizationState& state);

  std::size_t size() const { return names_.size(); }
  std::size_t soa() const { return soa_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  std::span<const Edge> edges() const { return edges_; }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& negatives() const { return negatives_; }

  std::size_t slot_count() const { return names_.size() * names_.size() * 4; }
  std::size_t slot(std::size_t from, std::size_t to, Permission p) const {
    return (from * names_.size() + to) * 4 + index_of(p);
  }
  bool present(std::size_t slot) const { return present_[slot] != 0; }
  bool inactive(std::size_t slot) const { return inactive_[slot] != 0; }

 private:
  std::vector<std::string> names_;
  std::size_t soa_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> negatives_;
  std::vector<char> present_;
  std::vector<char> inactive_;
};

}  // namespace deleg
