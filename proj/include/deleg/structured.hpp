#pragma once

// Machine-readable documents shared by the CLI (--output structured) and the
// HTTP service. Every top-level document carries "schema" and "kind".
// docs/structured-schema.md describes the layout.

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "deleg/planner.hpp"
#include "deleg/state.hpp"
#include "deleg/transition.hpp"
#include "deleg/verifier.hpp"

namespace deleg {

using Json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "deleg/1";

class StructuredError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// {"schema": ..., "kind": kind} merged with the members of `body`.
Json document(std::string_view kind, Json body = Json::object());

Json to_json(const AuthorizationState& state);
Json to_json(const Action& action);
Json to_json(const Triple& triple);
Json to_json(const StepDelta& delta);
Json to_json(const Violation& violation);
Json to_json(const InvariantReport& report);
Json to_json(const PlanResult& result);

// Throw StructuredError on missing or mistyped members. state_from_json also
// runs validate_state.
AuthorizationState state_from_json(const Json& j);
Action action_from_json(const Json& j);

Json error_document(std::string_view code, std::string_view message);

// Two-space indented, keys sorted, trailing newline. Byte-stable.
std::string render(const Json& j);

}  // namespace deleg
