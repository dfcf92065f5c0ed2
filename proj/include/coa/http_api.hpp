#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "coa/session.hpp"

namespace httplib {
class Server;
}

namespace coa {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> static_dir;
  int precision = 2;
  std::optional<std::string> token;  // shared bearer token; none = open
};

// Values given on the command line; unset fields fall back to the environment
// (COA_LISTEN=host:port, COA_DATA_DIR, COA_STATIC_DIR, COA_PRECISION, COA_TOKEN),
// then to ServiceConfig defaults.
struct ServiceFlags {
  std::optional<std::string> listen;
  std::optional<std::string> data_dir;
  std::optional<std::string> static_dir;
  std::optional<int> precision;
  std::optional<std::string> token;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup process_environment();

ServiceConfig resolve_service_config(const ServiceFlags& flags, const EnvLookup& env);

// Registers the session API routes on `server`:
//   POST /sessions                                   body: scenario document
//   GET  /sessions/{id}
//   GET  /sessions/{id}/rounds/{n}/bundle
//   POST /sessions/{id}/rounds                       body: {amendments, decisions, expected_base_round}
//   GET  /sessions/{id}/rounds/{n}/analysis?method=...&<param>=...[&params=k:v;k:v]
//   GET  /sessions/{id}/export
void mount_session_api(httplib::Server& server, SessionStore& store, const ServiceConfig& config);

// Blocks serving until the process is stopped.
int run_service(const ServiceConfig& config);

}  // namespace coa
