#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

// Eigen must come before httplib: <resolv.h>, pulled in by httplib, defines
// a _res macro that collides with Eigen's internal parameter names.
#include "liesig/service.hpp"

#include "httplib.h"

namespace liesig {

inline constexpr int kDefaultPort = 8787;

namespace detail {

inline void reply(httplib::Response& res, const LogSigService::Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

inline constexpr const char* kFallbackPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>liesig service</title></head>
<body>
<h1>liesig service</h1>
<p>No explorer assets are installed. Start with <code>liesig serve --static DIR</code> to serve them.</p>
<ul>
<li><code>POST /api/logsig</code> {"dim", "level", "points"}</li>
<li><code>POST /api/solve</code> {"target", "initial_points", "options"}</li>
<li><code>GET /api/basis?dim=2&amp;level=4&amp;order=lyndon</code></li>
</ul>
</body></html>
)";

}  // namespace detail

/// Registers the JSON API on srv, and static assets under "/" when a
/// directory is given (a small index page otherwise).
inline void mount_routes(httplib::Server& srv, std::shared_ptr<const LogSigService> service,
                         const std::optional<std::string>& static_dir = std::nullopt) {
  srv.Post("/api/logsig", [service](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service->handle_logsig(req.body));
  });
  srv.Post("/api/solve", [service](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service->handle_solve(req.body));
  });
  srv.Get("/api/basis", [service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    detail::reply(res, service->handle_basis(query));
  });
  if (static_dir) {
    if (!srv.set_mount_point("/", *static_dir)) throw std::invalid_argument("static directory not found: " + *static_dir);
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(detail::kFallbackPage, "text/html; charset=utf-8");
    });
  }
}

}  // namespace liesig
