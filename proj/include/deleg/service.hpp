#pragma once

// Session-based HTTP facade. All request and response bodies use the
// structured schema. `handle` is transport-independent; `install` routes an
// httplib server to it.

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "deleg/structured.hpp"

namespace httplib {
class Server;
}

namespace deleg {

struct ServiceConfig {
  std::chrono::seconds session_ttl{std::chrono::hours(24)};
  std::chrono::seconds preview_ttl{std::chrono::minutes(10)};
  std::size_t verify_state_cap = 1'000'000;
  // Verify requests above this sample count are refused (422).
  std::size_t verify_sample_cap = 100'000;
  // Empty disables POST .../snapshot.
  std::string snapshot_dir;
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  Json body;
};

class Service {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit Service(ServiceConfig config = {}, Clock clock = nullptr);
  ~Service();

  Response handle(const Request& request);

  std::size_t session_count() const;
  std::size_t preview_count() const;

 private:
  struct Entry {
    AuthorizationState state;
    std::optional<Action> action;  // empty for the initial state
  };
  struct Session {
    mutable std::shared_mutex mutex;
    std::vector<Entry> history;
    std::chrono::system_clock::time_point created;
    std::chrono::system_clock::time_point modified;
    // Last access on the service clock, for expiry; read without the mutex.
    std::atomic<std::chrono::steady_clock::rep> touched{0};
  };
  struct Preview {
    AuthorizationState state;
    Action action;
    std::chrono::steady_clock::time_point expires;
  };

  Response create_session(const Request& r);
  Response delete_session(const std::string& id);
  Response get_session(const Session& s, const std::string& id);
  Response get_state(const Session& s, const Request& r);
  Response get_history(const Session& s);
  Response get_dot(const Session& s, const Request& r);
  Response post_action(Session& s, const Request& r);
  Response post_truncate(Session& s, const Request& r);
  Response get_query(const Session& s, const Request& r);
  Response post_plan(const Session& s, const Request& r);
  Response post_verify(const Session& s, const Request& r);
  Response get_snapshot(const Session& s);
  Response post_snapshot(const Session& s, const std::string& id);
  Response get_preview(const std::string& id);

  std::shared_ptr<Session> find(const std::string& id);
  std::string fresh_id(const char* prefix);
  void expire();

  ServiceConfig config_;
  Clock clock_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  mutable std::mutex previews_mutex_;
  std::map<std::string, Preview> previews_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
};

// Routes every method and path on `server` to `service.handle`.
void install(httplib::Server& server, Service& service);

}  // namespace deleg
