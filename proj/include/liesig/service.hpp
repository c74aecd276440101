#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "liesig/hall.hpp"
#include "liesig/io.hpp"
#include "liesig/logsig.hpp"

namespace liesig {

/// Log signature payload in the requested basis. Non-Lyndon bases go through
/// the tensor route, since BCH tables are expressed in Lyndon coordinates.
inline Json logsig_payload(const PathPoints& path, const LogSigContext& ctx, LogSigMethod method,
                           HallOrder order = HallOrder::lyndon_foliage, const HallBasis* hall = nullptr) {
  if (order == HallOrder::lyndon_foliage) {
    return logsig_json(path_logsig(path, ctx, method));
  }
  std::optional<HallBasis> local;
  if (!hall) hall = &local.emplace(build_hall_basis(ctx.dim(), ctx.level(), order));
  if (path.empty()) throw std::invalid_argument("path has no points");
  auto t = tensor_log(path_signature(path, ctx.level()));
  return hall_logsig_json(express_in_hall_basis(t, *hall), *hall);
}

struct SolveOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;
  double damping = 1e-3;
  double fd_step = 1e-6;
};

struct SolveResult {
  PathPoints points;
  double residual_norm;
  int iterations;
  bool converged;
};

/// Levenberg-Marquardt on F(free vertices) = logsig(path) - target. The first
/// point stays where it is; the Jacobian is taken by central differences.
inline SolveResult solve_path_for_logsig(const LogSigContext& ctx, const std::vector<double>& target,
                                         const PathPoints& initial, const SolveOptions& opt = {}) {
  const int d = ctx.dim();
  const auto n = static_cast<Eigen::Index>(target.size());
  if (target.size() != ctx.basis->size()) throw std::invalid_argument("target has the wrong number of components");
  if (initial.dim() != d || initial.size() < 2) throw std::invalid_argument("initial path needs at least two points");
  const auto unknowns = static_cast<Eigen::Index>((initial.size() - 1) * static_cast<std::size_t>(d));

  auto to_path = [&](const Eigen::VectorXd& x) {
    PathPoints p(d);
    p.push_back(initial[0]);
    std::vector<double> pt(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < unknowns; i += d) {
      for (int k = 0; k < d; ++k) pt[static_cast<std::size_t>(k)] = x[i + k];
      p.push_back(pt);
    }
    return p;
  };
  auto residual = [&](const Eigen::VectorXd& x) {
    auto ls = path_logsig(to_path(x), ctx);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = ls[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
    return r;
  };

  Eigen::VectorXd x(unknowns);
  for (std::size_t i = 1; i < initial.size(); ++i)
    for (int k = 0; k < d; ++k) x[static_cast<Eigen::Index>((i - 1) * static_cast<std::size_t>(d)) + k] = initial[i][static_cast<std::size_t>(k)];

  Eigen::VectorXd r = residual(x);
  double norm = r.norm();
  double lambda = opt.damping;
  int it = 0;
  Eigen::MatrixXd jac(n, unknowns);
  while (norm > opt.tolerance && it < opt.max_iterations) {
    ++it;
    for (Eigen::Index j = 0; j < unknowns; ++j) {
      Eigen::VectorXd hi = x, lo = x;
      hi[j] += opt.fd_step;
      lo[j] -= opt.fd_step;
      jac.col(j) = (residual(hi) - residual(lo)) / (2 * opt.fd_step);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal().array() += lambda;
    Eigen::VectorXd step = damped.partialPivLu().solve(-grad);
    Eigen::VectorXd candidate = x + step;
    Eigen::VectorXd rc = residual(candidate);
    const double cnorm = rc.norm();
    if (std::isfinite(cnorm) && cnorm < norm) {
      x = std::move(candidate);
      r = std::move(rc);
      norm = cnorm;
      lambda = std::max(lambda / 10, 1e-12);
    } else {
      lambda = std::min(lambda * 10, 1e12);
    }
  }
  return {to_path(x), norm, it, norm <= opt.tolerance};
}

/// Request handlers behind the HTTP routes. Bodies are JSON text; every
/// response is a status code plus a JSON document, errors as {"error": ...}.
class LogSigService {
public:
  struct Response {
    int status;
    Json body;
  };

  static constexpr int kMaxDim = 5;
  static constexpr int kMaxLevel = 8;
  static constexpr int kSolveDim = 2;
  static constexpr int kSolveLevel = 4;
  static constexpr std::size_t kSolvePoints = 5;

  Response handle_logsig(const std::string& body) const {
    return guarded([&] {
      const Json req = parse(body);
      const int d = get_int(req, "dim"), m = get_int(req, "level");
      check_guard(d, m);
      const auto method = parse_logsig_method(req.value("method", std::string("bch")));
      const auto order = parse_hall_order(req.value("basis", std::string("lyndon")));
      auto path = get_points(req, "points", d);
      if (path.empty()) return Response{422, error_body("path has no points")};
      auto ctx = context(d, m);
      const HallBasis* hall = order == HallOrder::lyndon_foliage ? nullptr : hall_basis(d, m, order).get();
      return Response{200, logsig_payload(path, *ctx, method, order, hall)};
    });
  }

  Response handle_solve(const std::string& body) const {
    return guarded([&] {
      const Json req = parse(body);
      if (req.value("dim", kSolveDim) != kSolveDim || req.value("level", kSolveLevel) != kSolveLevel)
        throw bad_request("solve supports only dim 2, level 4");
      auto ctx = context(kSolveDim, kSolveLevel);
      const auto target = get_numbers(req, "target");
      if (target.size() != ctx->basis->size()) throw bad_request("target must have 8 components");
      auto initial = get_points(req, "initial_points", kSolveDim);
      if (initial.size() != kSolvePoints) throw bad_request("initial_points must hold 5 points");
      SolveOptions opt;
      if (req.contains("options")) {
        const Json& o = req.at("options");
        if (!o.is_object()) throw bad_request("options must be an object");
        opt.max_iterations = o.contains("max_iterations") ? get_int(o, "max_iterations") : opt.max_iterations;
        opt.tolerance = o.contains("tolerance") ? get_number(o, "tolerance") : opt.tolerance;
        opt.damping = o.contains("damping") ? get_number(o, "damping") : opt.damping;
        if (opt.max_iterations < 0 || opt.max_iterations > 10000) throw bad_request("max_iterations out of range");
        if (!(opt.tolerance >= 0) || !(opt.damping > 0)) throw bad_request("tolerance and damping must be positive");
      }
      auto res = solve_path_for_logsig(*ctx, target, initial, opt);
      Json out;
      out["points"] = points_json(res.points);
      out["residual_norm"] = res.residual_norm;
      out["iterations"] = res.iterations;
      out["converged"] = res.converged;
      return Response{200, out};
    });
  }

  /// Query parameters dim, level and optional order.
  Response handle_basis(const std::map<std::string, std::string>& query) const {
    return guarded([&] {
      auto param = [&](const std::string& key) -> int {
        auto it = query.find(key);
        if (it == query.end()) throw bad_request("missing parameter '" + key + "'");
        try {
          std::size_t used = 0;
          int v = std::stoi(it->second, &used);
          if (used != it->second.size()) throw std::invalid_argument(key);
          return v;
        } catch (const std::exception&) {
          throw bad_request("parameter '" + key + "' must be an integer");
        }
      };
      const int d = param("dim"), m = param("level");
      check_guard(d, m);
      auto it = query.find("order");
      const auto order = parse_hall_order(it == query.end() ? "lyndon" : it->second);
      auto basis = hall_basis(d, m, order);
      Json out;
      out["dim"] = d;
      out["level"] = m;
      out["order"] = to_string(order);
      out["elements"] = hall_labels(*basis);
      return Response{200, out};
    });
  }

  /// Shared read-only tables for (d, m), built on first use.
  std::shared_ptr<const LogSigContext> context(int d, int m) const {
    std::lock_guard lock(mutex_);
    auto& slot = contexts_[{d, m}];
    if (!slot) slot = std::make_shared<const LogSigContext>(LogSigContext::prepare(d, m));
    return slot;
  }

  std::shared_ptr<const HallBasis> hall_basis(int d, int m, HallOrder order) const {
    std::lock_guard lock(mutex_);
    auto& slot = hall_[{d, m, static_cast<int>(order)}];
    if (!slot) slot = std::make_shared<const HallBasis>(build_hall_basis(d, m, order));
    return slot;
  }

private:
  struct bad_request : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
  };

  static Json error_body(const std::string& msg) { return Json{{"error", msg}}; }

  template <class F>
  static Response guarded(F&& f) {
    try {
      return f();
    } catch (const Json::exception& e) {
      return {400, error_body(std::string("malformed request: ") + e.what())};
    } catch (const not_lie_element_error& e) {
      return {422, error_body(e.what())};
    } catch (const std::invalid_argument& e) {
      return {400, error_body(e.what())};
    } catch (const std::out_of_range& e) {
      return {400, error_body(e.what())};
    } catch (const std::exception& e) {
      return {500, error_body(e.what())};
    }
  }

  static Json parse(const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) throw bad_request("malformed JSON body");
    if (!j.is_object()) throw bad_request("request body must be a JSON object");
    return j;
  }

  static void check_guard(int d, int m) {
    if (d < 1 || d > kMaxDim) throw bad_request("dim must be between 1 and " + std::to_string(kMaxDim));
    if (m < 1 || m > kMaxLevel) throw bad_request("level must be between 1 and " + std::to_string(kMaxLevel));
  }

  static int get_int(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) throw bad_request(std::string("'") + key + "' must be an integer");
    return j.at(key).get<int>();
  }

  static double get_number(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw bad_request(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
  }

  static std::vector<double> get_numbers(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw bad_request(std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) throw bad_request(std::string("'") + key + "' must be an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  static PathPoints get_points(const Json& j, const char* key, int d) {
    if (!j.contains(key) || !j.at(key).is_array()) throw bad_request(std::string("'") + key + "' must be an array of points");
    PathPoints path(d);
    for (const auto& p : j.at(key)) {
      if (!p.is_array() || p.size() != static_cast<std::size_t>(d))
        throw bad_request("every point must have " + std::to_string(d) + " coordinates");
      std::vector<double> pt;
      for (const auto& c : p) {
        if (!c.is_number()) throw bad_request("coordinates must be numbers");
        pt.push_back(c.get<double>());
      }
      path.push_back(pt);
    }
    return path;
  }

  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const LogSigContext>> contexts_;
  mutable std::map<std::tuple<int, int, int>, std::shared_ptr<const HallBasis>> hall_;
};

}  // namespace liesig
