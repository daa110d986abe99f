#include <charconv>

#include "httplib.h"
#include "json.hpp"

#include "dg2pix/service.hpp"

namespace dg2pix {

using nlohmann::json;

namespace {

std::vector<std::size_t> parse_positions(std::string_view text) {
  std::vector<std::size_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) throw Error("bad bar list: " + std::string(item));
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

json body_of(const httplib::Request& req) { return json::parse(req.body.empty() ? "{}" : req.body); }

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const NotFound& e) {
      send_error(res, 404, e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, e.what());
    } catch (const Error& e) {
      send_error(res, 400, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

void send_json(httplib::Response& res, const std::string& body) { res.set_content(body, "application/json"); }

void send_png(httplib::Response& res, const std::vector<std::uint8_t>& png) {
  res.set_content(std::string(png.begin(), png.end()), "image/png");
}

bool wants_json(const httplib::Request& req) {
  if (req.has_param("format")) return req.get_param_value("format") == "json";
  const auto accept = req.get_header_value("Accept");
  return accept.find("application/json") != std::string::npos && accept.find("image/png") == std::string::npos;
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}
  Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;
  const std::string sid = R"(/sessions/([^/]+))";

  srv.Get("/datasets", guarded([&svc](const auto&, auto& res) { send_json(res, svc.datasets_json()); }));
  srv.Get(R"(/datasets/([^/]+)/layout)",
          guarded([&svc](const auto& req, auto& res) { send_json(res, svc.layout_json(req.matches[1])); }));
  srv.Post("/sessions", guarded([&svc](const auto& req, auto& res) {
             const auto body = body_of(req);
             std::optional<std::size_t> cap;
             if (body.contains("screen_width_px")) cap = body.at("screen_width_px").template get<std::size_t>();
             const auto id = svc.create_session(body.at("dataset").template get<std::string>(), cap);
             res.status = 201;
             send_json(res, json{{"session", id}, {"view", json::parse(svc.view_json(id))}}.dump());
           }));
  srv.Get(sid + "/view", guarded([&svc](const auto& req, auto& res) { send_json(res, svc.view_json(req.matches[1])); }));
  srv.Post(sid + "/drill", guarded([&svc](const auto& req, auto& res) {
             send_json(res, svc.drill(req.matches[1], body_of(req).at("bar").template get<std::size_t>()));
           }));
  srv.Post(sid + "/rollup", guarded([&svc](const auto& req, auto& res) {
             send_json(res,
                       svc.rollup(req.matches[1], body_of(req).at("bars").template get<std::vector<std::size_t>>()));
           }));
  srv.Post(sid + "/window", guarded([&svc](const auto& req, auto& res) {
             const auto body = body_of(req);
             std::optional<std::pair<std::uint64_t, std::uint64_t>> range;
             if (!body.value("clear", false))
               range = std::make_pair(body.at("t0").template get<std::uint64_t>(),
                                      body.at("t1").template get<std::uint64_t>());
             send_json(res, svc.window(req.matches[1], range));
           }));
  srv.Post(sid + "/order", guarded([&svc](const auto& req, auto& res) { send_json(res, svc.order(req.matches[1], req.body)); }));
  srv.Post(sid + "/cluster", guarded([&svc](const auto& req, auto& res) {
             send_json(res, svc.cluster(req.matches[1], body_of(req).value("min_cluster_size", std::size_t{5})));
           }));
  srv.Post(sid + "/method", guarded([&svc](const auto& req, auto& res) {
             send_json(res, svc.set_method(req.matches[1], body_of(req).at("method").template get<std::string>()));
           }));
  srv.Post(sid + "/select", guarded([&svc](const auto& req, auto& res) {
             send_json(res,
                       svc.select(req.matches[1], body_of(req).at("bars").template get<std::vector<std::size_t>>()));
           }));
  srv.Get(sid + "/pixels", guarded([&svc](const auto& req, auto& res) {
            if (wants_json(req))
              send_json(res, svc.pixels_json(req.matches[1]));
            else
              send_png(res, svc.pixels_png(req.matches[1]));
          }));
  srv.Get(sid + "/zoombar", guarded([&svc](const auto& req, auto& res) {
            if (req.has_param("format") && req.get_param_value("format") == "png")
              send_png(res, svc.zoombar_png(req.matches[1]));
            else
              send_json(res, svc.zoombar_json(req.matches[1]));
          }));
  srv.Get(sid + "/graph", guarded([&svc](const auto& req, auto& res) {
            if (!req.has_param("bars")) throw Error("missing bars parameter");
            send_json(res, svc.graph_json(req.matches[1], parse_positions(req.get_param_value("bars"))));
          }));
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace dg2pix
