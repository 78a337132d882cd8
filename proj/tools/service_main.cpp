#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"

#include "deleg/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTP session service for the delegation engine"};
  std::string bind = "127.0.0.1";
  int port = 8080;
  long session_ttl = 24 * 3600, preview_ttl = 600;
  deleg::ServiceConfig config;
  app.add_option("--bind", bind)->envname("DELEG_BIND")->capture_default_str();
  app.add_option("--port", port)->envname("DELEG_PORT")->capture_default_str();
  app.add_option("--session-ttl", session_ttl, "Seconds")->envname("DELEG_SESSION_TTL")->capture_default_str();
  app.add_option("--preview-ttl", preview_ttl, "Seconds")->envname("DELEG_PREVIEW_TTL")->capture_default_str();
  app.add_option("--verify-cap", config.verify_state_cap, "State cap for verify")
      ->envname("DELEG_VERIFY_CAP")
      ->capture_default_str();
  app.add_option("--snapshot-dir", config.snapshot_dir)->envname("DELEG_SNAPSHOT_DIR");
  CLI11_PARSE(app, argc, argv);
  config.session_ttl = std::chrono::seconds(session_ttl);
  config.preview_ttl = std::chrono::seconds(preview_ttl);

  deleg::Service service(config);
  httplib::Server server;
  deleg::install(server, service);
  std::cerr << "listening on " << bind << ":" << port << "\n";
  if (!server.listen(bind, port)) {
    std::cerr << "cannot listen on " << bind << ":" << port << "\n";
    return 1;
  }
  return 0;
}
