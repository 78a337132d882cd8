#include "deleg/state.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>

namespace deleg {

std::string to_string(const Action& action) {
  std::string out{to_string(action.scheme)};
  out += ' ';
  out += action.actor;
  out += ' ';
  out += action.target;
  return out;
}

AuthorizationState::AuthorizationState(std::string soa, std::vector<std::string> principals,
                                       std::vector<Authorization> positive,
                                       std::vector<NegativeAuthorization> negative)
    : soa_(std::move(soa)),
      principals_(std::move(principals)),
      positive_(std::move(positive)),
      negative_(std::move(negative)) {
  std::sort(principals_.begin(), principals_.end());
  std::sort(positive_.begin(), positive_.end());
  std::sort(negative_.begin(), negative_.end());
}

bool AuthorizationState::has_principal(std::string_view name) const {
  return std::binary_search(principals_.begin(), principals_.end(), name);
}

std::optional<std::size_t> AuthorizationState::principal_index(std::string_view name) const {
  auto it = std::lower_bound(principals_.begin(), principals_.end(), name);
  if (it == principals_.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - principals_.begin());
}

const Authorization* AuthorizationState::find_positive(std::string_view grantor,
                                                       std::string_view grantee,
                                                       Permission permission) const {
  auto it = std::find_if(positive_.begin(), positive_.end(), [&](const Authorization& a) {
    return a.grantor == grantor && a.grantee == grantee && a.permission == permission;
  });
  return it == positive_.end() ? nullptr : &*it;
}

bool AuthorizationState::has_positive_between(std::string_view grantor,
                                              std::string_view grantee) const {
  return std::any_of(positive_.begin(), positive_.end(), [&](const Authorization& a) {
    return a.grantor == grantor && a.grantee == grantee;
  });
}

bool AuthorizationState::has_negative(std::string_view grantor, std::string_view grantee) const {
  return std::any_of(negative_.begin(), negative_.end(), [&](const NegativeAuthorization& n) {
    return n.grantor == grantor && n.grantee == grantee;
  });
}

bool AuthorizationState::has_inactive() const {
  return std::any_of(positive_.begin(), positive_.end(),
                     [](const Authorization& a) { return !a.active; });
}

std::string_view to_string(StructuralError::Kind kind) {
  using K = StructuralError::Kind;
  switch (kind) {
    case K::EmptySoa: return "empty-soa";
    case K::SoaNotPrincipal: return "soa-not-principal";
    case K::InvalidName: return "invalid-name";
    case K::DuplicatePrincipal: return "duplicate-principal";
    case K::UnknownPrincipal: return "unknown-principal";
    case K::SelfAuthorization: return "self-authorization";
    case K::DuplicatePositive: return "duplicate-authorization";
    case K::DuplicateNegative: return "duplicate-negative";
  }
  return "structural-error";
}

bool is_valid_principal_name(std::string_view name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isspace(u) || std::iscntrl(u);
  });
}

std::vector<StructuralError> validate_state(const AuthorizationState& state) {
  using K = StructuralError::Kind;
  std::vector<StructuralError> errors;
  const auto& names = state.principals();

  if (state.soa().empty()) {
    errors.push_back({K::EmptySoa, "no source of authority"});
  } else if (!state.has_principal(state.soa())) {
    errors.push_back({K::SoaNotPrincipal, state.soa()});
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!is_valid_principal_name(names[i])) errors.push_back({K::InvalidName, names[i]});
    if (i > 0 && names[i] == names[i - 1]) errors.push_back({K::DuplicatePrincipal, names[i]});
  }

  auto check_endpoints = [&](const std::string& grantor, const std::string& grantee,
                             const std::string& what) {
    if (!state.has_principal(grantor)) errors.push_back({K::UnknownPrincipal, grantor + " in " + what});
    if (!state.has_principal(grantee)) errors.push_back({K::UnknownPrincipal, grantee + " in " + what});
    if (grantor == grantee) errors.push_back({K::SelfAuthorization, what});
  };

  const auto& pos = state.positive();
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const auto& a = pos[k];
    std::string what = "auth " + a.grantor + " " + a.grantee + " " + std::string(to_string(a.permission));
    check_endpoints(a.grantor, a.grantee, what);
    // Sorted order puts equal triples next to each other.
    if (k > 0 && pos[k - 1].grantor == a.grantor && pos[k - 1].grantee == a.grantee &&
        pos[k - 1].permission == a.permission) {
      errors.push_back({K::DuplicatePositive, what});
    }
  }
  const auto& neg = state.negative();
  for (std::size_t k = 0; k < neg.size(); ++k) {
    std::string what = "neg " + neg[k].grantor + " " + neg[k].grantee;
    check_endpoints(neg[k].grantor, neg[k].grantee, what);
    if (k > 0 && neg[k - 1] == neg[k]) errors.push_back({K::DuplicateNegative, what});
  }
  return errors;
}

IndexedState::IndexedState(const AuthorizationState& state) : names_(state.principals()) {
  assert(validate_state(state).empty());
  const std::size_t n = names_.size();
  soa_ = *state.principal_index(state.soa());
  present_.assign(n * n * 4, 0);
  inactive_.assign(n * n * 4, 0);
  edges_.reserve(state.positive().size());
  for (const auto& a : state.positive()) {
    auto from = static_cast<std::uint32_t>(*state.principal_index(a.grantor));
    auto to = static_cast<std::uint32_t>(*state.principal_index(a.grantee));
    edges_.push_back({from, to, a.permission, a.active});
    present_[slot(from, to, a.permission)] = 1;
    inactive_[slot(from, to, a.permission)] = a.active ? 0 : 1;
  }
  for (const auto& neg : state.negative()) {
    negatives_.emplace_back(static_cast<std::uint32_t>(*state.principal_index(neg.grantor)),
                            static_cast<std::uint32_t>(*state.principal_index(neg.grantee)));
  }
}

}  // namespace deleg
