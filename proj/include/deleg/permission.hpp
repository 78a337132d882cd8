#pragma once

// Static relations over the four positive permissions and the twelve action
// schemes. A permission is the pair (b1, b2): b1 is the right to issue
// positive authorizations, b2 the right to issue negative ones. The sign is
// not part of the type; negative authorizations live in their own set.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace deleg {

enum class Permission : std::uint8_t { TT = 0, TF = 1, FT = 2, FF = 3 };

inline constexpr std::array<Permission, 4> kAllPermissions{
    Permission::TT, Permission::TF, Permission::FT, Permission::FF};

constexpr std::size_t index_of(Permission p) { return static_cast<std::size_t>(p); }

enum class Scheme : std::uint8_t {
  GrantTT,
  GrantTF,
  GrantFT,
  GrantFF,
  WLD,
  WGD,
  SLD,
  SGD,
  WLN,
  WGN,
  SLN,
  SGN,
};

inline constexpr std::array<Scheme, 12> kAllSchemes{
    Scheme::GrantTT, Scheme::GrantTF, Scheme::GrantFT, Scheme::GrantFF,
    Scheme::WLD,     Scheme::WGD,     Scheme::SLD,     Scheme::SGD,
    Scheme::WLN,     Scheme::WGN,     Scheme::SLN,     Scheme::SGN};

// (+,granter) R (+,granted): a holder of `granter` may issue `granted`.
constexpr bool r_pos(Permission granter, Permission granted) {
  switch (granter) {
    case Permission::TT:
      return true;
    case Permission::TF:
      return granted == Permission::TF || granted == Permission::FF;
    case Permission::FT:
    case Permission::FF:
      return false;
  }
  return false;
}

// (+,perm) R (-,F,F).
constexpr bool can_issue_negative(Permission perm) {
  return perm == Permission::TT || perm == Permission::FT;
}

// Strict order: a can grant a strict superset of what b can grant.
constexpr bool stronger(Permission a, Permission b) {
  if (a == b) return false;
  if (a == Permission::TT) return true;
  return b == Permission::FF;
}

constexpr bool is_grant(Scheme s) { return s <= Scheme::GrantFF; }
constexpr bool is_delete(Scheme s) { return s >= Scheme::WLD && s <= Scheme::SGD; }
constexpr bool is_negative(Scheme s) { return s >= Scheme::WLN; }
constexpr bool is_revocation(Scheme s) { return !is_grant(s); }
constexpr bool is_local(Scheme s) {
  return s == Scheme::WLD || s == Scheme::SLD || s == Scheme::WLN || s == Scheme::SLN;
}
constexpr bool is_global(Scheme s) {
  return s == Scheme::WGD || s == Scheme::SGD || s == Scheme::WGN || s == Scheme::SGN;
}
constexpr bool is_strong(Scheme s) {
  return s == Scheme::SLD || s == Scheme::SGD || s == Scheme::SLN || s == Scheme::SGN;
}

// Which permissions a grant scheme may produce: grantTT accepts all four,
// grantTF {TF,FF}, grantFT only FT, grantFF only FF. False for revocations.
constexpr bool grant_compat(Permission perm, Scheme scheme) {
  switch (scheme) {
    case Scheme::GrantTT:
      return true;
    case Scheme::GrantTF:
      return perm == Permission::TF || perm == Permission::FF;
    case Scheme::GrantFT:
      return perm == Permission::FT;
    case Scheme::GrantFF:
      return perm == Permission::FF;
    default:
      return false;
  }
}

// The delete scheme with the same propagation and dominance as a negative one.
constexpr Scheme delete_counterpart(Scheme negative) {
  switch (negative) {
    case Scheme::WLN: return Scheme::WLD;
    case Scheme::WGN: return Scheme::WGD;
    case Scheme::SLN: return Scheme::SLD;
    case Scheme::SGN: return Scheme::SGD;
    default: return negative;
  }
}

std::string_view to_string(Permission p);
std::string_view to_string(Scheme s);
std::optional<Permission> parse_permission(std::string_view text);
std::optional<Scheme> parse_scheme(std::string_view text);

}  // namespace deleg
