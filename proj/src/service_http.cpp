#include <httplib.h>

#include "pgplan/service.hpp"

namespace pgplan {

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const std::exception& e) {
  int status = 400;
  std::string type = "Error";
  if (dynamic_cast<const UnknownSession*>(&e)) {
    status = 404;
    type = "UnknownSession";
  } else if (dynamic_cast<const AlreadyStarted*>(&e)) {
    status = 409;
    type = "AlreadyStarted";
  } else if (dynamic_cast<const NotAwaiting*>(&e)) {
    status = 409;
    type = "NotAwaiting";
  } else if (dynamic_cast<const SyntaxError*>(&e)) {
    type = "SyntaxError";
  }
  json err{{"type", type}, {"message", e.what()}};
  if (auto* pe = dynamic_cast<const Error*>(&e); pe && pe->pos()) {
    err["line"] = pe->pos()->line;
    err["col"] = pe->pos()->col;
  }
  reply(res, status, json{{"v", 1}, {"error", err}});
}

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const json::exception& e) {
      reply(res, 400, json{{"v", 1}, {"error", {{"type", "BadRequest"}, {"message", e.what()}}}});
    } catch (const std::exception& e) {
      reply_error(res, e);
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  httplib::Server srv;
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>()) {
  httplib::Server& srv = impl_->srv;

  srv.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
             json body = json::parse(req.body);
             std::string id = sessions.create(body.at("domain").get<std::string>(), body.at("problem").get<std::string>(),
                                              body.value("params", json::object()));
             reply(res, 201, json{{"v", 1}, {"session", id}, {"lifecycle", "created"}});
           }));

  srv.Post(R"(/sessions/([^/]+)/start)", guarded([&](const httplib::Request& req, httplib::Response& res) {
             sessions.start(req.matches[1]);
             reply(res, 200, json{{"v", 1}, {"ok", true}});
           }));

  srv.Get(R"(/sessions/([^/]+)/snapshot)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, sessions.snapshot(req.matches[1]));
          }));

  // NDJSON. follow=0 returns what is available; otherwise the stream stays
  // open until the session ends.
  srv.Get(R"(/sessions/([^/]+)/events)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            std::string id = req.matches[1];
            std::size_t since = req.has_param("since") ? std::stoul(req.get_param_value("since")) : 0;
            bool follow = !req.has_param("follow") || req.get_param_value("follow") != "0";
            sessions.snapshot(id);  // throws UnknownSession
            if (!follow) {
              std::string out;
              for (const auto& e : sessions.events(id, since)) out += e.dump() + "\n";
              res.set_content(out, "application/x-ndjson");
              return;
            }
            auto cursor = std::make_shared<std::size_t>(since);
            res.set_chunked_content_provider("application/x-ndjson", [&sessions, id, cursor](std::size_t, httplib::DataSink& sink) {
              auto batch = sessions.events(id, *cursor, std::chrono::milliseconds(500));
              for (const auto& e : batch) {
                std::string line = e.dump() + "\n";
                if (!sink.write(line.data(), line.size())) return false;
              }
              *cursor += batch.size();
              if (batch.empty() && sessions.closed(id)) {
                sink.done();
              }
              return true;
            });
          }));

  srv.Post(R"(/sessions/([^/]+)/respond)", guarded([&](const httplib::Request& req, httplib::Response& res) {
             sessions.respond(req.matches[1], json::parse(req.body));
             reply(res, 200, json{{"v", 1}, {"ok", true}});
           }));

}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->srv.bind_to_any_port(host);
  return impl_->srv.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->srv.listen_after_bind(); }

void HttpServer::stop() { impl_->srv.stop(); }

bool serve_http(SessionManager& sessions, const std::string& host, int port) {
  HttpServer server(sessions);
  if (server.bind(host, port) < 0) return false;
  return server.run();
}

}  // namespace pgplan
