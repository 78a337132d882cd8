#include "deleg/permission.hpp"

namespace deleg {

namespace {

constexpr std::array<std::string_view, 4> kPermissionNames{"TT", "TF", "FT", "FF"};

constexpr std::array<std::string_view, 12> kSchemeNames{
    "grantTT", "grantTF", "grantFT", "grantFF", "WLD", "WGD",
    "SLD",     "SGD",     "WLN",     "WGN",     "SLN", "SGN"};

}  // namespace

std::string_view to_string(Permission p) { return kPermissionNames[index_of(p)]; }

std::string_view to_string(Scheme s) { return kSchemeNames[static_cast<std::size_t>(s)]; }

std::optional<Permission> parse_permission(std::string_view text) {
  for (Permission p : kAllPermissions) {
    if (kPermissionNames[index_of(p)] == text) return p;
  }
  return std::nullopt;
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (Scheme s : kAllSchemes) {
    if (kSchemeNames[static_cast<std::size_t>(s)] == text) return s;
  }
  return std::nullopt;
}

}  // namespace deleg
