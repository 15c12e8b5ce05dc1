// Exercises the shared library through its C header only.
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "learnpath/learnpath.h"

using json = nlohmann::json;

namespace {

struct Landscape {
  lp_landscape* p = nullptr;
  ~Landscape() { lp_landscape_free(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  lp_string_free(s);
  return out;
}

lp_objective_config objective(double gamma, double horizon, int segments) {
  lp_objective_config c;
  lp_objective_config_default(&c);
  c.gamma = gamma;
  c.horizon = horizon;
  c.segments = segments;
  return c;
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(x >> s));
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(lp_version()) == "0.1.0");
  CHECK(std::string(lp_status_name(LP_OK)) == "ok");
  CHECK(std::string(lp_status_name(LP_DIVERGED_TRAINING)) == "diverged_training");
  lp_string_free(nullptr);
}

TEST_CASE("landscape handles") {
  // L = ½ θᵀ diag(2, 4) θ − (1, 1)ᵀθ around the origin
  const double base[2] = {0.0, 0.0}, grad[2] = {-1.0, -1.0}, hess[4] = {2.0, 0.0, 0.0, 4.0};
  Landscape q;
  REQUIRE(lp_landscape_quadratic(2, base, 0.0, grad, hess, &q.p) == LP_OK);
  CHECK(lp_landscape_dim(q.p) == 2);
  const double theta[2] = {1.0, 2.0};
  double value = 0.0, g[2], h[4];
  REQUIRE(lp_landscape_eval(q.p, theta, &value, g, h) == LP_OK);
  CHECK(value == doctest::Approx(1.0 + 8.0 - 3.0));
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(7.0));
  CHECK(h[3] == 4.0);

  Landscape well;
  REQUIRE(lp_landscape_double_well_2d(1.0, 1.0, 1.0, -0.5, &well.p) == LP_OK);
  const double origin[2] = {0.0, 0.0};
  REQUIRE(lp_landscape_eval(well.p, origin, &value, nullptr, nullptr) == LP_OK);
  CHECK(value == doctest::Approx(1.0));

  CHECK(lp_landscape_eval(well.p, nullptr, &value, nullptr, nullptr) == LP_INVALID_INPUT);
  CHECK(std::strlen(lp_last_error_message()) > 0);
  CHECK(lp_landscape_quadratic(0, base, 0.0, grad, hess, nullptr) == LP_INVALID_INPUT);
}

TEST_CASE("objective evaluation and its gradient") {
  const double zero[1] = {0.0}, hess[1] = {0.0};
  Landscape flat;
  REQUIRE(lp_landscape_quadratic(1, zero, 0.0, zero, hess, &flat.p) == LP_OK);
  const auto cfg = objective(0.0, 1.0, 1);
  // one unit segment from 0 to 1 with no loss: kinetic ½
  const double states[2] = {0.0, 1.0};
  double value = 0.0, grad[2];
  REQUIRE(lp_objective_eval(flat.p, &cfg, states, &value, grad) == LP_OK);
  CHECK(value == doctest::Approx(0.5));
  CHECK(grad[1] == doctest::Approx(1.0));

  lp_objective_config bad = cfg;
  bad.eta = -1.0;
  CHECK(lp_objective_eval(flat.p, &bad, states, &value, nullptr) == LP_INVALID_INPUT);
}

TEST_CASE("direct optimization and the momentum solution agree") {
  const double theta0[1] = {1.0}, g[1] = {1.0}, h[1] = {1.0};
  Landscape q;  // minimum at 0
  REQUIRE(lp_landscape_quadratic(1, theta0, 0.5, g, h, &q.p) == LP_OK);
  const auto cfg = objective(0.0, 10.0, 400);
  const double end[1] = {std::exp(-10.0)};
  std::vector<double> states(401);
  double obj = 0.0;
  int converged = 0;
  REQUIRE(lp_direct_optimize(q.p, &cfg, theta0, end, 0, 20000, 1e-9, states.data(), &obj, &converged) == LP_OK);
  CHECK(converged == 1);
  double worst = 0.0;
  for (int j = 0; j <= 400; ++j) {
    const double t = 10.0 * j / 400;
    double th = 0.0;
    REQUIRE(lp_momentum_solution(q.p, &cfg, nullptr, t, &th) == LP_OK);
    CHECK(th == doctest::Approx(std::exp(-t)).epsilon(1e-9));
    worst = std::max(worst, std::abs(states[j] - th));
  }
  CHECK(worst <= 1e-3);

  Landscape well;
  REQUIRE(lp_landscape_double_well_1d(1.0, 0.5, 1.0, &well.p) == LP_OK);
  double th = 0.0;
  CHECK(lp_momentum_solution(well.p, &cfg, nullptr, 1.0, &th) == LP_INVALID_INPUT);
}

TEST_CASE("limit rules and update rules") {
  const double base[2] = {0.0, 0.0}, grad[2] = {2.0, 1.0}, hess[4] = {4.0, 0.0, 0.0, 1.0};
  Landscape q;
  REQUIRE(lp_landscape_quadratic(2, base, 0.0, grad, hess, &q.p) == LP_OK);
  const auto cfg = objective(2.0, 10.0, 100);
  double step[2];
  // −√(ηk) H^{-1/2} g dt
  REQUIRE(lp_limit_rule("ballistic", q.p, &cfg, 0.1, nullptr, step) == LP_OK);
  CHECK(step[0] == doctest::Approx(-0.1));
  CHECK(step[1] == doctest::Approx(-0.1));
  // −(ηk/γ) g dt
  REQUIRE(lp_limit_rule("gradient_descent", q.p, &cfg, 0.1, nullptr, step) == LP_OK);
  CHECK(step[0] == doctest::Approx(-0.1));
  CHECK(step[1] == doctest::Approx(-0.05));
  CHECK(lp_limit_rule("natural_gradient", q.p, &cfg, 0.1, nullptr, step) == LP_INVALID_INPUT);
  CHECK(lp_limit_rule("sideways", q.p, &cfg, 0.1, nullptr, step) == LP_INVALID_INPUT);

  const double m[2] = {1.0, -2.0}, v[2] = {4.0, 1.0};
  REQUIRE(lp_adaptive_rule(2, m, v, 1.0, 1.0, 0.1, step) == LP_OK);
  CHECK(step[0] == doctest::Approx(-0.05));
  CHECK(step[1] == doctest::Approx(0.2));

  double theta[1] = {0.0}, second[1] = {0.0};
  const double g1[1] = {1.0};
  REQUIRE(lp_ballistic_step(1, theta, g1, second, 0.1, 0.9, 1e-8) == LP_OK);
  CHECK(second[0] == doctest::Approx(0.1));
  CHECK(theta[0] == doctest::Approx(-0.1 / (std::sqrt(0.1) + 1e-8)));
  CHECK(lp_ballistic_step(1, theta, g1, second, -0.1, 0.9, 1e-8) == LP_INVALID_INPUT);
}

TEST_CASE("idx datasets through the C API") {
  const auto dir = std::filesystem::temp_directory_path() / "learnpath_capi_idx";
  std::filesystem::create_directories(dir);
  std::vector<std::uint8_t> images, labels;
  put_be32(images, 0x00000803);
  put_be32(images, 2);
  put_be32(images, 2);
  put_be32(images, 1);
  images.insert(images.end(), {0, 255, 51, 102});
  put_be32(labels, 0x00000801);
  put_be32(labels, 2);
  labels.insert(labels.end(), {3, 7});
  write_bytes(dir / "img", images);
  write_bytes(dir / "lab", labels);

  lp_dataset* d = nullptr;
  REQUIRE(lp_dataset_load_idx((dir / "img").c_str(), (dir / "lab").c_str(), &d) == LP_OK);
  CHECK(lp_dataset_size(d) == 2);
  CHECK(lp_dataset_features(d) == 2);
  CHECK(lp_dataset_classes(d) >= 8);
  double x[4];
  int y[2];
  REQUIRE(lp_dataset_copy(d, x, y) == LP_OK);
  CHECK(x[1] == 1.0);
  CHECK(x[2] == doctest::Approx(0.2));
  CHECK(y[0] == 3);
  CHECK(y[1] == 7);
  lp_dataset_free(d);

  images[3] = 0x04;
  write_bytes(dir / "bad", images);
  CHECK(lp_dataset_load_idx((dir / "bad").c_str(), (dir / "lab").c_str(), &d) == LP_FORMAT_ERROR);
  CHECK(std::string(lp_last_error_message()).find("magic") != std::string::npos);
  CHECK(lp_dataset_load_idx((dir / "nope").c_str(), (dir / "lab").c_str(), &d) == LP_IO_ERROR);
}

TEST_CASE("error messages are per thread") {
  CHECK(lp_adaptive_rule(0, nullptr, nullptr, 1, 1, 1, nullptr) == LP_INVALID_INPUT);
  const std::string mine = lp_last_error_message();
  std::string other = "unset";
  std::thread t([&] { other = lp_last_error_message(); });
  t.join();
  CHECK(other.empty());
  CHECK(std::string(lp_last_error_message()) == mine);
  CHECK(lp_version() != nullptr);
}

TEST_CASE("experiment catalog, defaults and runs") {
  char* s = nullptr;
  REQUIRE(lp_experiment_list(&s) == LP_OK);
  const json list = json::parse(take(s));
  CHECK(list.size() == 7);

  REQUIRE(lp_experiment_defaults("momentum", &s) == LP_OK);
  const json schema = json::parse(take(s));
  bool has_gammas = false;
  for (const auto& k : schema) has_gammas |= k["key"] == "gammas";
  CHECK(has_gammas);
  CHECK(lp_experiment_defaults("nope", &s) == LP_CONFIG_ERROR);

  const auto dir = std::filesystem::temp_directory_path() / "learnpath_capi_run";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(dir / "m.cfg");
    cfg << "gammas = 0, 2\nsamples = 50\n";
  }
  const char* overrides[] = {"samples=20", "seed=9"};
  REQUIRE(lp_experiment_run("momentum", (dir / "m.cfg").c_str(), overrides, 2, (dir / "out").c_str(), &s) == LP_OK);
  const json summary = json::parse(take(s));
  CHECK(summary["passed"] == true);
  CHECK(summary["files"].size() == 2);

  std::ifstream mf(dir / "out" / "manifest.json");
  const json manifest = json::parse(mf);
  CHECK(manifest["experiment"] == "momentum");
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["config"]["samples"] == "20");  // flag beats file
  CHECK(manifest["config"]["gammas"] == "0, 2");
  CHECK(manifest["version"] == "0.1.0");
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(manifest.contains("versions"));

  // 2 gammas × 21 samples + header
  std::ifstream csv(dir / "out" / "momentum_traces.csv");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 43);

  const char* bad[] = {"gamma_list=1"};
  CHECK(lp_experiment_run("momentum", nullptr, bad, 1, (dir / "bad").c_str(), nullptr) == LP_CONFIG_ERROR);
  CHECK(std::string(lp_last_error_message()).find("gamma_list") != std::string::npos);
  const char* diverge[] = {"optimizers=sgd", "eta_sgd=1e200"};
  CHECK(lp_experiment_run("train", nullptr, diverge, 2, (dir / "div").c_str(), nullptr) == LP_DIVERGED_TRAINING);
}

TEST_CASE("verify subset") {
  const int only[] = {3, 12};
  char* report = nullptr;
  int ok = 0;
  REQUIRE(lp_verify(1, only, 2, &report, &ok) == LP_OK);
  const json r = json::parse(take(report));
  REQUIRE(r.size() == 2);
  CHECK(r[0]["criterion"] == 3);
  CHECK(ok == 1);
  const int bad[] = {13};
  CHECK(lp_verify(1, bad, 1, nullptr, &ok) == LP_INVALID_INPUT);
}
