#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "liesig/http.hpp"
#include "oracles.hpp"

using namespace liesig;

namespace {

const std::vector<std::vector<double>> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};

Json logsig_request(int d, int m, const std::vector<std::vector<double>>& pts) {
  return Json{{"dim", d}, {"level", m}, {"points", pts}};
}

std::vector<double> forward(const LogSigService& svc, const std::vector<std::vector<double>>& pts) {
  auto r = svc.handle_logsig(logsig_request(2, 4, pts).dump());
  EXPECT_EQ(r.status, 200);
  return r.body["values"].get<std::vector<double>>();
}

Json solve_request(const std::vector<double>& target, const std::vector<std::vector<double>>& initial) {
  return Json{{"target", target}, {"initial_points", initial}};
}

std::vector<std::vector<double>> as_points(const Json& j) { return j.get<std::vector<std::vector<double>>>(); }

}  // namespace

TEST(Service, LogsigExamples) {
  LogSigService svc;
  auto r = svc.handle_logsig(logsig_request(2, 2, kSquare).dump());
  ASSERT_EQ(r.status, 200);
  auto v = r.body["values"].get<std::vector<double>>();
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[0], 0, 1e-12);
  EXPECT_NEAR(v[1], 0, 1e-12);
  EXPECT_NEAR(v[2], 1, 1e-12);
  EXPECT_EQ(r.body["basis"], (std::vector<std::string>{"1", "2", "12"}));

  auto single = svc.handle_logsig(logsig_request(2, 4, {{0.5, 0.5}}).dump());
  ASSERT_EQ(single.status, 200);
  EXPECT_EQ(single.body["values"], std::vector<double>(8, 0.0));
}

TEST(Service, LogsigMatchesLibrary) {
  LogSigService svc;
  std::mt19937 rng(71);
  auto pts = oracle::random_path(rng, 3, 6);
  auto ctx = LogSigContext::prepare(3, 4);
  auto expected = logsig_json(path_logsig(PathPoints(3, pts), ctx)).dump();
  EXPECT_EQ(svc.handle_logsig(logsig_request(3, 4, pts).dump()).body.dump(), expected);

  auto req = logsig_request(3, 4, pts);
  req["basis"] = "coropa";
  auto r = svc.handle_logsig(req.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["basis"][3], "[1, 2]");
  EXPECT_EQ(r.body["values"].size(), 32u);
}

TEST(Service, LogsigErrors) {
  LogSigService svc;
  auto status = [&](const std::string& body) { return svc.handle_logsig(body).status; };
  EXPECT_EQ(status(logsig_request(6, 2, {{0, 0, 0, 0, 0, 0}}).dump()), 400);
  EXPECT_EQ(status(logsig_request(2, 9, kSquare).dump()), 400);
  EXPECT_EQ(status(logsig_request(0, 2, kSquare).dump()), 400);
  EXPECT_EQ(status(logsig_request(2, 2, {}).dump()), 422);
  EXPECT_EQ(status("{not json"), 400);
  EXPECT_EQ(status("[1,2]"), 400);
  EXPECT_EQ(status(R"({"dim":2,"level":2})"), 400);
  EXPECT_EQ(status(R"({"dim":"2","level":2,"points":[[0,0]]})"), 400);
  EXPECT_EQ(status(R"({"dim":2,"level":2,"points":[[0,0,1]]})"), 400);
  EXPECT_EQ(status(R"({"dim":2,"level":2,"points":[[0,"a"]]})"), 400);
  EXPECT_EQ(status(R"({"dim":2,"level":2,"points":[[0,0]],"method":"series"})"), 400);
  auto r = svc.handle_logsig(logsig_request(6, 2, {}).dump());
  EXPECT_TRUE(r.body.contains("error"));
  EXPECT_TRUE(r.body["error"].is_string());
}

TEST(Service, BasisEndpoint) {
  LogSigService svc;
  auto r = svc.handle_basis({{"dim", "2"}, {"level", "4"}, {"order", "lyndon"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["elements"], (std::vector<std::string>{"1", "2", "[1, 2]", "[1, [1, 2]]", "[[1, 2], 2]",
                                                          "[1, [1, [1, 2]]]", "[[1, [1, 2]], 2]", "[[[1, 2], 2], 2]"}));
  auto c = svc.handle_basis({{"dim", "2"}, {"level", "3"}, {"order", "coropa"}});
  EXPECT_EQ(c.body["elements"], (std::vector<std::string>{"1", "2", "[1, 2]", "[1, [1, 2]]", "[2, [1, 2]]"}));
  EXPECT_EQ(svc.handle_basis({{"dim", "2"}, {"level", "3"}, {"order", "bogus"}}).status, 400);
  EXPECT_EQ(svc.handle_basis({{"dim", "2"}}).status, 400);
  EXPECT_EQ(svc.handle_basis({{"dim", "x"}, {"level", "3"}}).status, 400);
  EXPECT_EQ(svc.handle_basis({{"dim", "9"}, {"level", "3"}}).status, 400);
}

TEST(Service, SolveFixedPoint) {
  LogSigService svc;
  std::mt19937 rng(72);
  auto pts = oracle::random_path(rng, 2, 5);
  auto r = svc.handle_solve(solve_request(forward(svc, pts), pts).dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["residual_norm"], 0.0);
  EXPECT_LE(r.body["iterations"].get<int>(), 1);
  EXPECT_TRUE(r.body["converged"]);
  EXPECT_EQ(as_points(r.body["points"]), pts);
}

TEST(Service, SolvePerturbedSquare) {
  LogSigService svc;
  std::mt19937 rng(73);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  auto target = forward(svc, kSquare);
  auto initial = kSquare;
  for (auto& p : initial)
    for (auto& c : p) c += noise(rng);
  auto r = svc.handle_solve(solve_request(target, initial).dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_LE(r.body["residual_norm"].get<double>(), 1e-6);
  EXPECT_EQ(as_points(r.body["points"])[0], initial[0]);  // first point pinned
}

TEST(Service, SolveSteersEnclosedArea) {
  LogSigService svc;
  const std::vector<std::vector<double>> start{{-0.23, -0.4}, {-0.61, 0.47}, {0.85, 0.37}, {-0.15, 0.13}, {-0.57, -0.69}};
  auto target = forward(svc, start);
  target[2] += 0.1;
  auto r = svc.handle_solve(solve_request(target, start).dump());
  ASSERT_EQ(r.status, 200);
  ASSERT_TRUE(r.body["converged"]);
  auto got = forward(svc, as_points(r.body["points"]));
  EXPECT_NEAR(got[2], target[2], 1e-6);
}

TEST(Service, SquareSitsOnAFoldOfTheForwardMap) {
  // At the unit square the Jacobian has rank 7, and raising the area alone
  // leaves the image of four-segment paths: the solver must report failure
  // together with its best iterate rather than claim convergence.
  LogSigService svc;
  auto target = forward(svc, kSquare);
  target[2] += 0.1;
  auto r = svc.handle_solve(solve_request(target, kSquare).dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_FALSE(r.body["converged"]);
  EXPECT_LT(r.body["residual_norm"].get<double>(), 0.01);
  auto got = forward(svc, as_points(r.body["points"]));
  EXPECT_NEAR(got[2], target[2], 1e-3);
}

TEST(Service, SolveRoundTrip) {
  LogSigService svc;
  std::mt19937 rng(74);
  std::normal_distribution<double> noise(0, 0.02);
  int converged = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto pts = oracle::random_path(rng, 2, 5);
    auto initial = pts;
    for (auto& p : initial)
      for (auto& c : p) c += noise(rng);
    auto r = svc.handle_solve(solve_request(forward(svc, pts), initial).dump());
    ASSERT_EQ(r.status, 200);
    if (r.body["residual_norm"].get<double>() <= 1e-6 && r.body["iterations"].get<int>() <= 100) ++converged;
  }
  EXPECT_GE(converged, 18);
}

TEST(Service, SolveReportsFailureWithBestIterate) {
  LogSigService svc;
  std::vector<double> far(8, 50.0);
  auto req = solve_request(far, kSquare);
  req["options"] = {{"max_iterations", 5}};
  auto r = svc.handle_solve(req.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_FALSE(r.body["converged"]);
  EXPECT_EQ(r.body["iterations"], 5);
  EXPECT_EQ(r.body["points"].size(), 5u);
}

TEST(Service, SolveErrors) {
  LogSigService svc;
  auto status = [&](const Json& j) { return svc.handle_solve(j.dump()).status; };
  EXPECT_EQ(status(solve_request(std::vector<double>(7, 0.0), kSquare)), 400);
  EXPECT_EQ(status(solve_request(std::vector<double>(8, 0.0), {{0, 0}, {1, 1}})), 400);
  auto wrong_dim = solve_request(std::vector<double>(8, 0.0), kSquare);
  wrong_dim["dim"] = 3;
  EXPECT_EQ(status(wrong_dim), 400);
  auto bad_opt = solve_request(std::vector<double>(8, 0.0), kSquare);
  bad_opt["options"] = {{"tolerance", "tight"}};
  EXPECT_EQ(status(bad_opt), 400);
  EXPECT_EQ(svc.handle_solve("nope").status, 400);
}

TEST(Service, Stateless) {
  LogSigService svc;
  std::mt19937 rng(75);
  auto a = oracle::random_path(rng, 2, 5), b = oracle::random_path(rng, 2, 5);
  auto ra = svc.handle_logsig(logsig_request(2, 4, a).dump()).body.dump();
  auto sa = svc.handle_solve(solve_request(forward(svc, b), a).dump()).body.dump();
  svc.handle_logsig(logsig_request(3, 5, oracle::random_path(rng, 3, 4)).dump());
  EXPECT_EQ(svc.handle_logsig(logsig_request(2, 4, a).dump()).body.dump(), ra);
  EXPECT_EQ(svc.handle_solve(solve_request(forward(svc, b), a).dump()).body.dump(), sa);

  std::vector<std::string> results(4);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < results.size(); ++i)
    threads.emplace_back([&, i] { results[i] = svc.handle_logsig(logsig_request(2, 4, a).dump()).body.dump(); });
  for (auto& t : threads) t.join();
  for (const auto& r : results) EXPECT_EQ(r, ra);
}

TEST(Http, RoutesOverLoopback) {
  httplib::Server srv;
  mount_routes(srv, std::make_shared<LogSigService>());
  const int port = srv.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Post("/api/logsig", logsig_request(2, 2, kSquare).dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_NE(r->get_header_value("Content-Type").find("application/json"), std::string::npos);
  auto body = Json::parse(r->body);
  EXPECT_NEAR(body["values"][2].get<double>(), 1, 1e-12);

  auto bad = cli.Post("/api/logsig", logsig_request(6, 2, {}).dump(), "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_TRUE(Json::parse(bad->body).contains("error"));

  auto basis = cli.Get("/api/basis?dim=2&level=3&order=hall");
  ASSERT_TRUE(basis);
  EXPECT_EQ(Json::parse(basis->body)["elements"][2], "[2, 1]");

  auto solve = cli.Post("/api/solve", solve_request(forward(LogSigService{}, kSquare), kSquare).dump(), "application/json");
  ASSERT_TRUE(solve);
  EXPECT_EQ(solve->status, 200);
  EXPECT_TRUE(Json::parse(solve->body)["converged"]);

  auto index = cli.Get("/");
  ASSERT_TRUE(index);
  EXPECT_EQ(index->status, 200);
  EXPECT_NE(index->body.find("/api/logsig"), std::string::npos);

  srv.stop();
  worker.join();
}

TEST(Http, ServesStaticDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "liesig_static_test";
  std::filesystem::create_directories(dir);
  { std::ofstream(dir / "index.html") << "<p>explorer</p>"; }
  httplib::Server srv;
  mount_routes(srv, std::make_shared<LogSigService>(), dir.string());
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Get("/index.html");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->body, "<p>explorer</p>");
  auto root = cli.Get("/");
  ASSERT_TRUE(root);
  EXPECT_EQ(root->body, "<p>explorer</p>");
  srv.stop();
  worker.join();
  std::filesystem::remove_all(dir);
  EXPECT_THROW(mount_routes(srv, std::make_shared<LogSigService>(), (dir / "missing").string()), std::invalid_argument);
}
