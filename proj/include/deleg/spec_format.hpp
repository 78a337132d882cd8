#pragma once

// Line-oriented text formats: authorization specs, action scripts and goal
// expressions. `#` starts a comment anywhere on a line.
//
//   soa A
//   principal B
//   auth A B TT
//   auth B C TF inactive
//   neg A B
//
//   do WLD A B
//
//   access(F) & !holds(B,TT) & unchanged(D)

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deleg/planner.hpp"
#include "deleg/state.hpp"

namespace deleg {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownPrincipal, DuplicateSoa, Structural };

  ParseError(Kind kind, std::size_t line, const std::string& detail);
  Kind kind() const { return kind_; }
  // 1-based; 0 when the error is not tied to one line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

std::string_view to_string(ParseError::Kind kind);

AuthorizationState parse_spec(std::string_view text);
// Canonical: soa first, other principals sorted, then auth and neg lines in
// sorted order. Byte-stable.
std::string serialize_spec(const AuthorizationState& state);

std::vector<Action> parse_script(std::string_view text);
std::string serialize_script(const std::vector<Action>& actions);

// Also accepts `not_access(P)` and `not_holds(P,TT)`.
Goal parse_goal(std::string_view text);

}  // namespace deleg
