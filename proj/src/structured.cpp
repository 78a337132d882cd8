#include "deleg/structured.hpp"

namespace deleg {

Json document(std::string_view kind, Json body) {
  Json out = Json::object();
  out["schema"] = kSchemaVersion;
  out["kind"] = kind;
  for (auto& [key, value] : body.items()) out[key] = value;
  return out;
}

Json to_json(const AuthorizationState& state) {
  Json positive = Json::array();
  for (const auto& a : state.positive()) {
    positive.push_back({{"grantor", a.grantor},
                        {"grantee", a.grantee},
                        {"permission", to_string(a.permission)},
                        {"active", a.active}});
  }
  Json negative = Json::array();
  for (const auto& n : state.negative()) {
    negative.push_back({{"grantor", n.grantor}, {"grantee", n.grantee}});
  }
  return {{"soa", state.soa()},
          {"principals", state.principals()},
          {"positive", positive},
          {"negative", negative}};
}

Json to_json(const Action& action) {
  return {{"scheme", to_string(action.scheme)}, {"actor", action.actor}, {"target", action.target}};
}

Json to_json(const Triple& triple) {
  return {{"grantor", triple.grantor},
          {"grantee", triple.grantee},
          {"permission", to_string(triple.permission)}};
}

Json to_json(const StepDelta& delta) {
  auto list = [](const std::vector<Triple>& triples) {
    Json out = Json::array();
    for (const auto& t : triples) out.push_back(to_json(t));
    return out;
  };
  Json neg = Json::array();
  for (const auto& n : delta.neg_added) neg.push_back({{"grantor", n.grantor}, {"grantee", n.grantee}});
  return {{"deleted", list(delta.deleted)},
          {"added", list(delta.added)},
          {"inactivated", list(delta.inactivated)},
          {"neg_added", neg}};
}

Json to_json(const Violation& v) {
  Json out = {{"grantor", v.grantor}, {"grantee", v.grantee}};
  out["sign"] = v.permission ? "+" : "-";
  out["permission"] = v.permission ? Json(to_string(*v.permission)) : Json(nullptr);
  return out;
}

Json to_json(const InvariantReport& report) {
  const auto& p = report.params;
  Json params = {{"n", p.n}, {"depth", p.depth}, {"state_cap", p.state_cap}};
  if (p.mode != VerifyMode::Exhaustive) {
    params["samples"] = p.samples;
    params["seed"] = p.seed;
  }
  Json out = {{"invariant", to_string(p.invariant)},
              {"mode", to_string(p.mode)},
              {"params", params},
              {"result", report.holds ? "HOLDS" : "COUNTEREXAMPLE"},
              {"states_checked", report.states_checked},
              {"steps_checked", report.steps_checked}};
  if (p.mode == VerifyMode::RandomArbitrary) {
    out["states_rejected"] = report.states_rejected;
    out["non_total_steps"] = report.non_total_steps;
  }
  if (report.witness) {
    const auto& w = *report.witness;
    Json trace = Json::array();
    for (const auto& a : w.trace) trace.push_back(to_json(a));
    out["witness"] = {{"state", to_json(w.state)},
                      {"action", to_json(w.action)},
                      {"violation", to_json(w.violation)},
                      {"trace", trace}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

Json to_json(const PlanResult& result) {
  return {{"action", to_json(result.action)},
          {"cost", result.cost},
          {"post_state", to_json(result.post_state)}};
}

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw StructuredError(std::string("missing member '") + key + "'");
  }
  return j.at(key);
}

std::string text(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_string()) throw StructuredError(std::string("member '") + key + "' must be a string");
  return v.get<std::string>();
}

Permission permission(const Json& j) {
  auto p = parse_permission(text(j, "permission"));
  if (!p) throw StructuredError("bad permission '" + text(j, "permission") + "'");
  return *p;
}

}  // namespace

AuthorizationState state_from_json(const Json& j) {
  std::string soa = text(j, "soa");
  std::vector<std::string> principals;
  const Json& names = member(j, "principals");
  if (!names.is_array()) throw StructuredError("'principals' must be an array");
  for (const auto& n : names) {
    if (!n.is_string()) throw StructuredError("principal names must be strings");
    principals.push_back(n.get<std::string>());
  }
  std::vector<Authorization> positive;
  if (j.contains("positive")) {
    for (const auto& a : member(j, "positive")) {
      bool active = true;
      if (a.contains("active")) {
        if (!a.at("active").is_boolean()) throw StructuredError("'active' must be a boolean");
        active = a.at("active").get<bool>();
      }
      positive.push_back({text(a, "grantor"), text(a, "grantee"), permission(a), active});
    }
  }
  std::vector<NegativeAuthorization> negative;
  if (j.contains("negative")) {
    for (const auto& n : member(j, "negative")) {
      negative.push_back({text(n, "grantor"), text(n, "grantee")});
    }
  }
  AuthorizationState state(std::move(soa), std::move(principals), std::move(positive),
                           std::move(negative));
  auto errors = validate_state(state);
  if (!errors.empty()) {
    throw StructuredError(std::string(to_string(errors.front().kind)) + ": " +
                          errors.front().detail);
  }
  return state;
}

Action action_from_json(const Json& j) {
  auto scheme = parse_scheme(text(j, "scheme"));
  if (!scheme) throw StructuredError("unknown scheme '" + text(j, "scheme") + "'");
  return {*scheme, text(j, "actor"), text(j, "target")};
}

Json error_document(std::string_view code, std::string_view message) {
  return document("error", {{"code", code}, {"message", message}});
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace deleg
