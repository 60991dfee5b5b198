#include "writor/http_server.hpp"

#include <httplib.h>

#include <chrono>
#include <iostream>
#include <mutex>

#include "writor/errors.hpp"
#include "writor/serialize.hpp"

namespace writor {

using nlohmann::json;

struct HttpServer::Impl {
  SessionService& service;
  HttpServerOptions options;
  httplib::Server server;
  std::mutex log_mu;

  Impl(SessionService& s, HttpServerOptions o) : service(s), options(std::move(o)) {}

  void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void send_error(httplib::Response& res, const ApiError& err, int status = 0) {
    send_json(res, status != 0 ? status : http_status(err.code), err.to_json());
  }

  static json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw PreconditionError("request body must be a JSON object");
    return j;
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  httplib::Server::Handler guarded(Handler h) {
    return [this, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const std::exception& e) {
        send_error(res, api_error_from(e));
      }
    };
  }

  void routes() {
    const std::string sid = "([^:/]+)";  // not "/:", which httplib reads as a path-parameter route
    const std::string sp = "/sessions/" + sid;
    const std::string cp = sp + "/cards/" + sid;

    server.Post("/sessions", guarded([this](const auto&, auto& res) {
      send_json(res, 201, session_to_json(service.create_session()));
    }));
    server.Post("/sessions:import", guarded([this](const auto& req, auto& res) {
      send_json(res, 201, session_to_json(service.import_session(json::parse(req.body))));
    }));
    server.Get(sp, guarded([this](const auto& req, auto& res) {
      send_json(res, 200, session_to_json(service.get_session(req.matches[1])));
    }));
    server.Put(sp + "/context", guarded([this](const auto& req, auto& res) {
      auto ctx = body_of(req).template get<AssignmentContext>();
      send_json(res, 200, session_to_json(service.set_context(req.matches[1], ctx)));
    }));
    server.Post(sp + "/goals:suggest", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, json{{"goals", service.suggest_goals(req.matches[1])}});
    }));
    server.Put(sp + "/goals:selection", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto selected = b.value("selected", std::vector<std::string>{});
      auto custom = b.value("custom", std::vector<std::string>{});
      send_json(res, 200, json{{"goals", service.select_goals(req.matches[1], selected, custom)}});
    }));
    server.Put(sp + "/draft", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      std::optional<int> base;
      if (auto it = b.find("base_version"); it != b.end() && !it->is_null()) base = it->template get<int>();
      Draft d = service.put_draft(req.matches[1], b.at("content").template get<std::string>(), base);
      send_json(res, 200, d);
    }));
    server.Post(sp + "/feedback", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, json{{"cards", service.run_feedback(req.matches[1])}});
    }));
    server.Post(sp + "/feedback:targeted", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      auto start = b.at("start").template get<std::size_t>();
      auto end = b.at("end").template get<std::size_t>();
      std::string q = b.value("question", "");
      send_json(res, 200, service.targeted(req.matches[1], start, end, q));
    }));
    server.Post(cp + "/chat", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      std::string msg = b.value("message", "");
      send_json(res, 200, service.chat(req.matches[1], req.matches[2], msg));
    }));
    server.Post(cp + "/example", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, service.find_example(req.matches[1], req.matches[2]));
    }));
    server.Post(cp + ":addressed", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, service.mark_addressed(req.matches[1], req.matches[2]));
    }));
    server.Get(sp + "/progress", guarded([this](const auto& req, auto& res) {
      Progress p = service.progress(req.matches[1]);
      send_json(res, 200, json{{"fraction", p.fraction}, {"addressed", p.addressed}, {"total", p.total}});
    }));
    server.Get(sp + "/export", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, service.export_session(req.matches[1]));
    }));
    server.Post(sp + "/events", guarded([this](const auto& req, auto& res) {
      json b = body_of(req);
      service.record_event(req.matches[1], b.at("name").template get<std::string>(),
                           b.value("payload", json::object()));
      send_json(res, 202, json{{"accepted", true}});
    }));
  }

  void hooks() {
    server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!options.cors_origin.empty()) {
        res.set_header("Access-Control-Allow-Origin", options.cors_origin);
        res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
        res.set_header("Vary", "Origin");
      }
      if (req.method == "OPTIONS") {
        res.status = 204;
        return httplib::Server::HandlerResponse::Handled;
      }
      if (!options.bearer_token.empty() && req.get_header_value("Authorization") != "Bearer " + options.bearer_token) {
        send_error(res, ApiError{ApiErrorCode::bad_request, "missing or invalid bearer token", nullptr}, 401);
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
    // Unmatched routes and anything httplib rejects itself still get an
    // ApiError body.
    server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      ApiErrorCode code = res.status == 404 ? ApiErrorCode::not_found
                          : res.status >= 500 ? ApiErrorCode::internal
                                              : ApiErrorCode::bad_request;
      send_error(res, ApiError{code, "no route for " + req.method + " " + req.path, nullptr}, res.status);
    });
    server.set_exception_handler([this](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, api_error_from(e));
      } catch (...) {
        send_error(res, ApiError{ApiErrorCode::internal, "unknown error", nullptr});
      }
    });
    if (options.log_requests) {
      server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
        json line{{"ts", format_instant(now())},
                  {"method", req.method},
                  {"path", req.path},
                  {"status", res.status},
                  {"bytes", res.body.size()}};
        std::lock_guard lock(log_mu);
        std::cerr << line.dump() << "\n";
      });
    }
  }
};

HttpServer::HttpServer(SessionService& service, HttpServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->hooks();
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    int port = impl_->server.bind_to_any_port(o.host);
    if (port < 0) throw Error("cannot bind " + o.host);
    o.port = port;
    return port;
  }
  if (!impl_->server.bind_to_port(o.host, o.port)) {
    throw Error("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return o.port;
}

void HttpServer::listen() {
  if (!impl_->server.listen_after_bind()) {
    if (impl_->server.is_running()) throw Error("server stopped unexpectedly");
  }
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace writor
