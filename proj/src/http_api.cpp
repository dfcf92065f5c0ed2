#include "coa/http_api.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "coa/report.hpp"

namespace coa {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message,
                Json extra = Json::object()) {
  extra["error"] = message;
  send_json(res, status, extra);
}

std::size_t parse_round_index(const std::string& text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw RoundNotFound("bad round index '" + text + "'");
  }
  return value;
}

Json formatted_matrices(const MatrixBundle& bundle, int precision) {
  Json out = Json::object();
  for (auto kind : kAllMatrixKinds) {
    const auto& m = select(bundle, kind);
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(format_fixed(m(i, j), precision));
      rows.push_back(std::move(row));
    }
    out[std::string(matrix_symbol(kind))] = std::move(rows);
  }
  return out;
}

Json marks_json(const MatrixBundle& bundle) {
  Json out = Json::object();
  for (auto criterion : {Criterion::cost_utility, Criterion::penetration_probability}) {
    const auto grid = emit_preference_marks(bundle, criterion);
    Json rows = Json::array();
    for (const auto& row : grid.cells) {
      Json r = Json::array();
      for (auto mark : row) r.push_back(std::string(mark_text(mark)));
      rows.push_back(std::move(r));
    }
    out[std::string(to_string(criterion))] = std::move(rows);
  }
  return out;
}

// Runs a handler, mapping domain exceptions onto HTTP status codes.
template <typename Fn>
auto guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const SessionNotFound& e) {
      send_error(res, 404, e.what());
    } catch (const RoundNotFound& e) {
      send_error(res, 404, e.what());
    } catch (const RoundConflict& e) {
      send_error(res, 409, e.what(), Json{{"current_round", e.current_round()}});
    } catch (const InvalidScenario& e) {
      send_error(res, 422, "amended scenario is invalid",
                 Json{{"defects", defects_to_json(e.report().defects)}});
    } catch (const AmendmentError& e) {
      send_error(res, 400, e.what());
    } catch (const AnalysisError& e) {
      send_error(res, 400, e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

}  // namespace

EnvLookup process_environment() {
  return [](const char* name) -> std::optional<std::string> {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
  };
}

ServiceConfig resolve_service_config(const ServiceFlags& flags, const EnvLookup& env) {
  ServiceConfig config;
  auto pick = [&](const std::optional<std::string>& flag, const char* name) {
    return flag ? flag : env(name);
  };

  if (auto listen = pick(flags.listen, "COA_LISTEN")) {
    const auto colon = listen->rfind(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("listen address must be host:port, got '" + *listen + "'");
    }
    config.host = listen->substr(0, colon);
    const auto port_text = listen->substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 ||
        port > 65535) {
      throw std::invalid_argument("bad port in listen address '" + *listen + "'");
    }
    config.port = port;
  }
  if (auto dir = pick(flags.data_dir, "COA_DATA_DIR")) config.data_dir = *dir;
  if (auto dir = pick(flags.static_dir, "COA_STATIC_DIR")) config.static_dir = *dir;
  if (flags.precision) {
    config.precision = *flags.precision;
  } else if (auto p = env("COA_PRECISION")) {
    config.precision = std::stoi(*p);
  }
  if (config.precision < 0 || config.precision > 12) {
    throw std::invalid_argument("precision must lie in [0, 12]");
  }
  config.token = pick(flags.token, "COA_TOKEN");
  return config;
}

void mount_session_api(httplib::Server& server, SessionStore& store,
                       const ServiceConfig& config) {
  if (config.token) {
    const std::string expected = "Bearer " + *config.token;
    server.set_pre_routing_handler([expected](const httplib::Request& req, httplib::Response& res) {
      if (req.path.rfind("/sessions", 0) == 0 && req.get_header_value("Authorization") != expected) {
        send_error(res, 401, "missing or wrong bearer token");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
  }

  server.Post("/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    auto parsed = parse_scenario(req.body);
    if (!parsed.ok()) {
      send_error(res, 422, "invalid scenario", Json{{"defects", defects_to_json(parsed.defects)}});
      return;
    }
    const auto session = store.create(*parsed.scenario);
    send_json(res, 201, Json{{"id", session.id}});
  }));

  server.Get(R"(/sessions/([0-9a-f]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, session_summary_json(store.get(req.matches[1])));
             }));

  server.Get(R"(/sessions/([0-9a-f]+)/export)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, export_session(store.get(req.matches[1])));
             }));

  server.Get(R"(/sessions/([0-9a-f]+)/rounds/(\d+)/bundle)",
             guarded([&store, precision = config.precision](const httplib::Request& req,
                                                            httplib::Response& res) {
               const auto round = store.round(req.matches[1], parse_round_index(req.matches[2]));
               Json body = bundle_to_json(round.bundle);
               body["round"] = round.index;
               body["precision"] = precision;
               body["formatted"] = formatted_matrices(round.bundle, precision);
               body["marks"] = marks_json(round.bundle);
               send_json(res, 200, body);
             }));

  server.Post(R"(/sessions/([0-9a-f]+)/rounds)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const auto body = Json::parse(req.body);
                if (!body.is_object()) throw AmendmentError("round body must be an object");
                const double labor_rate = store.get(id).scenario().labor_rate;
                std::vector<Amendment> amendments;
                if (auto it = body.find("amendments"); it != body.end()) {
                  if (!it->is_array()) throw AmendmentError("'amendments' must be an array");
                  for (const auto& a : *it) amendments.push_back(amendment_from_json(a, labor_rate));
                }
                std::optional<Decisions> decisions;
                if (auto it = body.find("decisions"); it != body.end() && !it->is_null()) {
                  decisions = decisions_from_json(*it);
                }
                std::optional<std::size_t> expected;
                if (auto it = body.find("expected_base_round"); it != body.end() && !it->is_null()) {
                  if (!it->is_number_unsigned()) {
                    throw AmendmentError("'expected_base_round' must be a non-negative integer");
                  }
                  expected = it->get<std::size_t>();
                }
                const auto round =
                    store.append_round(id, std::move(amendments), std::move(decisions), expected);
                send_json(res, 201, round_to_json(round));
              }));

  server.Get(R"(/sessions/([0-9a-f]+)/rounds/(\d+)/analysis)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               AnalysisRequest request;
               request.method = req.get_param_value("method");
               if (request.method.empty()) throw AnalysisError("missing 'method' query parameter");
               for (const auto& [key, value] : req.params) {
                 if (key == "method") continue;
                 if (key == "params") {
                   for (auto& [k, v] : parse_param_list(value)) request.params[k] = v;
                 } else {
                   request.params[key] = value;
                 }
               }
               const auto result = store.query_analysis(
                   req.matches[1], parse_round_index(req.matches[2]), request);
               send_json(res, 200, selection_to_json(result));
             }));

  if (config.static_dir) server.set_mount_point("/", config.static_dir->string());
}

int run_service(const ServiceConfig& config) {
  SessionStore store(config.data_dir);
  httplib::Server server;
  mount_session_api(server, store, config);
  std::cerr << "coa: serving session API on http://" << config.host << ":" << config.port
            << (config.data_dir ? " (data in " + config.data_dir->string() + ")" : "") << "\n";
  if (!server.listen(config.host, config.port)) {
    std::cerr << "coa: cannot listen on " << config.host << ":" << config.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace coa
