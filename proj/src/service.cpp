#include "deleg/service.hpp"

#include <fstream>
#include <random>

#include "httplib.h"

#include "deleg/dot.hpp"
#include "deleg/semantics.hpp"
#include "deleg/spec_format.hpp"

namespace deleg {

namespace {

Response error(int status, std::string_view code, std::string_view message) {
  return {status, error_document(code, message)};
}

Response not_found(std::string_view what) { return error(404, "not-found", what); }

std::vector<std::string> segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto end = path.find('/', pos);
    if (end == std::string_view::npos) end = path.size();
    if (end > pos) out.emplace_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

// Malformed JSON surfaces as StructuredError so one handler maps it to 400.
Json parse_body(const std::string& body) {
  try {
    auto j = Json::parse(body.empty() ? std::string("{}") : body);
    if (!j.is_object()) throw StructuredError("body must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw StructuredError(std::string("malformed JSON: ") + e.what());
  }
}

std::size_t unsigned_member(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw StructuredError(std::string("member '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::int64_t unix_seconds(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

// Resolves ?index=k against a history; nullopt when out of range or malformed.
std::optional<std::size_t> history_index(const Request& r, std::size_t size) {
  auto it = r.query.find("index");
  if (it == r.query.end()) return size - 1;
  try {
    std::size_t used = 0;
    auto k = std::stoull(it->second, &used);
    if (used != it->second.size() || k >= size) return std::nullopt;
    return static_cast<std::size_t>(k);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

Service::Service(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      id_state_(std::random_device{}()) {}

Service::~Service() = default;

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::size_t Service::preview_count() const {
  std::lock_guard lock(previews_mutex_);
  return previews_.size();
}

std::string Service::fresh_id(const char* prefix) {
  std::lock_guard lock(id_mutex_);
  // splitmix64 step
  std::uint64_t z = (id_state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = prefix;
  for (int shift = 60; shift >= 0; shift -= 4) out += hex[(z >> shift) & 0xF];
  return out;
}

void Service::expire() {
  const auto now = clock_();
  {
    std::unique_lock lock(sessions_mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::chrono::steady_clock::time_point touched{
          std::chrono::steady_clock::duration(it->second->touched.load())};
      it = now - touched > config_.session_ttl ? sessions_.erase(it) : std::next(it);
    }
  }
  std::lock_guard lock(previews_mutex_);
  for (auto it = previews_.begin(); it != previews_.end();) {
    it = now >= it->second.expires ? previews_.erase(it) : std::next(it);
  }
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->touched = clock_().time_since_epoch().count();
  return it->second;
}

Response Service::handle(const Request& r) {
  expire();
  const auto parts = segments(r.path);
  try {
    if (parts.size() == 1 && parts[0] == "sessions" && r.method == "POST") return create_session(r);
    if (parts.size() == 2 && parts[0] == "previews" && r.method == "GET") return get_preview(parts[1]);
    if (parts.size() < 2 || parts.size() > 3 || parts[0] != "sessions") return not_found("no such route");

    const std::string& id = parts[1];
    auto session = find(id);
    if (!session) return not_found("unknown session " + id);

    if (parts.size() == 2) {
      if (r.method == "GET") {
        std::shared_lock lock(session->mutex);
        return get_session(*session, id);
      }
      if (r.method == "DELETE") return delete_session(id);
      return error(405, "method-not-allowed", r.method);
    }

    const std::string& leaf = parts[2];
    if (r.method == "GET") {
      std::shared_lock lock(session->mutex);
      if (leaf == "state") return get_state(*session, r);
      if (leaf == "history") return get_history(*session);
      if (leaf == "dot") return get_dot(*session, r);
      if (leaf == "query") return get_query(*session, r);
      if (leaf == "snapshot") return get_snapshot(*session);
    } else if (r.method == "POST") {
      if (leaf == "actions" || leaf == "truncate") {
        std::unique_lock lock(session->mutex);
        return leaf == "actions" ? post_action(*session, r) : post_truncate(*session, r);
      }
      if (leaf == "plan") return post_plan(*session, r);
      if (leaf == "verify") return post_verify(*session, r);
      if (leaf == "snapshot") return post_snapshot(*session, id);
    }
    return not_found("no such route");
  } catch (const StructuredError& e) {
    return error(400, "malformed-body", e.what());
  } catch (const ParseError& e) {
    return error(400, to_string(e.kind()), e.what());
  }
}

Response Service::create_session(const Request& r) {
  const Json body = parse_body(r.body);
  AuthorizationState state;
  if (body.contains("spec")) {
    if (!body.at("spec").is_string()) throw StructuredError("'spec' must be a string");
    state = parse_spec(body.at("spec").get<std::string>());
  } else if (body.contains("state")) {
    state = state_from_json(body.at("state"));
  } else {
    throw StructuredError("expected 'spec' or 'state'");
  }
  auto session = std::make_shared<Session>();
  session->history.push_back({std::move(state), std::nullopt});
  session->created = session->modified = std::chrono::system_clock::now();
  session->touched = clock_().time_since_epoch().count();
  const std::string id = fresh_id("s-");
  Response out{201, {}};
  {
    std::shared_lock lock(session->mutex);
    out.body = get_session(*session, id).body;
  }
  std::unique_lock lock(sessions_mutex_);
  sessions_[id] = std::move(session);
  return out;
}

Response Service::delete_session(const std::string& id) {
  std::unique_lock lock(sessions_mutex_);
  sessions_.erase(id);
  return {200, document("deleted", {{"session", id}})};
}

Response Service::get_session(const Session& s, const std::string& id) {
  return {200, document("session", {{"session", id},
                                    {"index", s.history.size() - 1},
                                    {"length", s.history.size()},
                                    {"created", unix_seconds(s.created)},
                                    {"modified", unix_seconds(s.modified)},
                                    {"state", to_json(s.history.back().state)}})};
}

Response Service::get_state(const Session& s, const Request& r) {
  auto k = history_index(r, s.history.size());
  if (!k) return not_found("no such history index");
  return {200, document("state", {{"index", *k}, {"state", to_json(s.history[*k].state)}})};
}

Response Service::get_history(const Session& s) {
  Json entries = Json::array();
  for (std::size_t k = 0; k < s.history.size(); ++k) {
    const auto& e = s.history[k];
    entries.push_back({{"index", k},
                       {"action", e.action ? to_json(*e.action) : Json(nullptr)},
                       {"state", to_json(e.state)}});
  }
  return {200, document("history", {{"entries", entries}})};
}

Response Service::get_dot(const Session& s, const Request& r) {
  auto k = history_index(r, s.history.size());
  if (!k) return not_found("no such history index");
  return {200, document("dot", {{"index", *k}, {"dot", export_dot(s.history[*k].state)}})};
}

Response Service::post_action(Session& s, const Request& r) {
  const Action action = action_from_json(parse_body(r.body));
  const auto& head = s.history.back().state;
  if (auto code = validate_action(head, action)) {
    return error(422, to_string(*code), to_string(action));
  }
  StepResult step;
  try {
    step = apply_action(head, action);
  } catch (const NonTotalModel& e) {
    return error(422, "non-total-model", e.what());
  }
  Json state = to_json(step.state);
  s.history.push_back({std::move(step.state), action});
  s.modified = std::chrono::system_clock::now();
  return {200, document("step", {{"index", s.history.size() - 1},
                                 {"action", to_json(action)},
                                 {"delta", to_json(step.delta)},
                                 {"state", std::move(state)}})};
}

Response Service::post_truncate(Session& s, const Request& r) {
  const Json body = parse_body(r.body);
  if (!body.contains("index")) throw StructuredError("missing member 'index'");
  const std::size_t k = unsigned_member(body, "index", 0);
  if (k >= s.history.size()) return error(422, "index-out-of-range", std::to_string(k));
  s.history.resize(k + 1);
  s.modified = std::chrono::system_clock::now();
  return {200, document("state", {{"index", k}, {"state", to_json(s.history.back().state)}})};
}

Response Service::get_query(const Session& s, const Request& r) {
  auto k = history_index(r, s.history.size());
  if (!k) return not_found("no such history index");
  const auto& state = s.history[*k].state;
  auto kind = r.query.count("kind") ? r.query.at("kind") : std::string();
  if (kind == "access") {
    return {200, document("query", {{"query", "access"}, {"index", *k},
                                    {"principals", query_access(state)}})};
  }
  if (kind == "holders") {
    auto perm = parse_permission(r.query.count("permission") ? r.query.at("permission") : "");
    if (!perm) return error(400, "malformed-query", "holders needs permission=TT|TF|FT|FF");
    auto mode_text = r.query.count("mode") ? r.query.at("mode") : std::string("all");
    if (mode_text != "all" && mode_text != "active") {
      return error(400, "malformed-query", "mode must be all or active");
    }
    auto mode = mode_text == "all" ? ChainMode::All : ChainMode::ActiveOnly;
    return {200, document("query", {{"query", "holders"},
                                    {"permission", to_string(*perm)},
                                    {"mode", mode_text},
                                    {"index", *k},
                                    {"principals", query_holders(state, *perm, mode)}})};
  }
  return error(400, "malformed-query", "kind must be access or holders");
}

Response Service::post_plan(const Session& s, const Request& r) {
  const Json body = parse_body(r.body);
  if (!body.contains("actor") || !body.at("actor").is_string()) {
    throw StructuredError("missing string member 'actor'");
  }
  if (!body.contains("goal") || !body.at("goal").is_string()) {
    throw StructuredError("missing string member 'goal'");
  }
  const Goal goal = parse_goal(body.at("goal").get<std::string>());
  AuthorizationState state;
  {
    std::shared_lock lock(s.mutex);
    state = s.history.back().state;
  }
  const auto actor = body.at("actor").get<std::string>();
  if (!state.has_principal(actor)) return error(422, "unknown-principal", actor);
  std::vector<PlanResult> results;
  try {
    results = plan(state, actor, goal);
  } catch (const GoalError& e) {
    return error(422, "unknown-principal-in-goal", e.what());
  }
  Json list = Json::array();
  const auto expires = clock_() + config_.preview_ttl;
  std::lock_guard lock(previews_mutex_);
  for (auto& result : results) {
    std::string preview = fresh_id("p-");
    list.push_back({{"action", to_json(result.action)}, {"cost", result.cost}, {"preview", preview}});
    previews_[preview] = {std::move(result.post_state), result.action, expires};
  }
  return {200, document("plan", {{"actor", actor},
                                 {"goal", to_string(goal)},
                                 {"preview_ttl_seconds", config_.preview_ttl.count()},
                                 {"results", list}})};
}

Response Service::get_preview(const std::string& id) {
  std::lock_guard lock(previews_mutex_);
  auto it = previews_.find(id);
  if (it == previews_.end()) return not_found("unknown or expired preview " + id);
  return {200, document("preview", {{"preview", id},
                                    {"action", to_json(it->second.action)},
                                    {"state", to_json(it->second.state)},
                                    {"dot", export_dot(it->second.state)}})};
}

Response Service::post_verify(const Session& s, const Request& r) {
  const Json body = parse_body(r.body);
  VerifyParams params;
  auto invariant = parse_invariant(body.value("invariant", std::string("connectivity")));
  if (!invariant) throw StructuredError("unknown invariant");
  params.invariant = *invariant;
  const auto mode = body.value("mode", std::string("exhaustive"));
  if (mode == "exhaustive") {
    params.mode = VerifyMode::Exhaustive;
  } else if (mode == "random") {
    params.mode = VerifyMode::Random;
  } else if (mode == "random-arbitrary") {
    params.mode = VerifyMode::RandomArbitrary;
  } else {
    throw StructuredError("unknown mode '" + mode + "'");
  }
  params.n = unsigned_member(body, "n", 3);
  params.depth = unsigned_member(body, "depth", 3);
  params.samples = unsigned_member(body, "samples", 1000);
  params.seed = unsigned_member(body, "seed", 0);
  params.state_cap = std::min(unsigned_member(body, "state_cap", config_.verify_state_cap),
                              config_.verify_state_cap);
  if (params.n == 0) return error(422, "bad-parameter", "n must be at least 1");
  if (params.mode != VerifyMode::Exhaustive && params.samples > config_.verify_sample_cap) {
    return error(422, "resource-bound-exceeded", "samples above the service cap");
  }
  if (body.value("from_session", false)) {
    if (params.mode != VerifyMode::Exhaustive) {
      return error(422, "bad-parameter", "from_session needs exhaustive mode");
    }
    std::shared_lock lock(s.mutex);
    params.start = s.history.back().state;
    params.n = params.start->principals().size();
  }
  try {
    return {200, document("report", to_json(verify_step_invariant(params)))};
  } catch (const ResourceBoundExceeded& e) {
    return error(422, "resource-bound-exceeded", e.what());
  } catch (const NonTotalModel& e) {
    return error(422, "non-total-model", e.what());
  }
}

Response Service::get_snapshot(const Session& s) {
  std::vector<Action> script;
  for (const auto& e : s.history) {
    if (e.action) script.push_back(*e.action);
  }
  return {200, document("snapshot", {{"spec", serialize_spec(s.history.front().state)},
                                     {"script", serialize_script(script)}})};
}

Response Service::post_snapshot(const Session& s, const std::string& id) {
  if (config_.snapshot_dir.empty()) return error(422, "snapshots-disabled", "no snapshot directory");
  Json doc;
  {
    std::shared_lock lock(s.mutex);
    doc = get_snapshot(s).body;
  }
  const std::string base = config_.snapshot_dir + "/" + id;
  std::ofstream(base + ".spec") << doc.at("spec").get<std::string>();
  std::ofstream(base + ".script") << doc.at("script").get<std::string>();
  return {200, document("snapshot", {{"spec_path", base + ".spec"}, {"script_path", base + ".script"}})};
}

void install(httplib::Server& server, Service& service) {
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) r.query.emplace(key, value);
    Response out = service.handle(r);
    res.status = out.status;
    res.set_content(render(out.body), "application/json");
  };
  server.Get(".*", route);
  server.Post(".*", route);
  server.Delete(".*", route);
}

}  // namespace deleg
