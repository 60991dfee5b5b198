#pragma once

#include <memory>
#include <string>

#include "writor/service.hpp"

namespace writor {

struct HttpServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin;
  std::string bearer_token;  // empty: unauthenticated
  bool log_requests = true;
};

// HTTP/JSON front end for SessionService.
//
//   POST /sessions                              create
//   POST /sessions:import                       import an exported document
//   GET  /sessions/{id}                         session document
//   PUT  /sessions/{id}/context                 AssignmentContext
//   POST /sessions/{id}/goals:suggest           five suggested goals
//   PUT  /sessions/{id}/goals:selection         {"selected": [ids], "custom": [texts]}
//   PUT  /sessions/{id}/draft                   {"content": "...", "base_version": n}
//   POST /sessions/{id}/feedback                run the pipeline
//   POST /sessions/{id}/feedback:targeted       {"start": s, "end": e, "question": "..."}
//   POST /sessions/{id}/cards/{cid}/chat        {"message": "..."}
//   POST /sessions/{id}/cards/{cid}/example     Find Example
//   POST /sessions/{id}/cards/{cid}:addressed   mark addressed
//   GET  /sessions/{id}/progress                {"fraction", "addressed", "total"}
//   GET  /sessions/{id}/export                  full schema:1 document
//   POST /sessions/{id}/events                  {"name": "...", "payload": {...}}
class HttpServer {
 public:
  HttpServer(SessionService& service, HttpServerOptions options);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket; returns the bound port. Throws Error on failure.
  int bind();
  // Serves until stop(); call bind() first.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace writor
