#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "relmotion/config.hpp"

using namespace relmotion;
using std::numbers::pi;

namespace {

std::string failing_field(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("empty object gives the default configuration") {
  const Config c = parse_config_text("{}");
  CHECK(c == Config{});
  CHECK(c.system.omega_ghz == 4.0);
  CHECK(c.system.g0_over_omega == 0.01);
  CHECK(c.drive.type == DriveType::harmonic);
  CHECK(c.drive.f0_rad == pi / 2);
  CHECK(c.drive.delta_f_rad == pi / 2);
  CHECK(c.drive.omega_d_over_omega == 2.0);
}

TEST_CASE("validation errors name the field") {
  CHECK(failing_field(R"({"system": {"g0_over_omega": 0.5}})") == "system.g0_over_omega");
  CHECK(failing_field(R"({"drive": {"type": "uniform_accel"}})") == "drive.accel_m_s2");
  CHECK(failing_field(R"({"system": {"n_max": 0}})") == "system.n_max");
  CHECK(failing_field(R"({"system": {"n_max": 2.5}})") == "system.n_max");
  CHECK(failing_field(R"({"system": {"gamma_khz": -1}})") == "system.gamma_khz");
  CHECK(failing_field(R"({"grid": {"steps_per_period": 100}})") == "grid.steps_per_period");
  CHECK(failing_field(R"({"grid": {"t_end_ns": "long"}})") == "grid.t_end_ns");
  CHECK(failing_field(R"({"drive": {"type": "circular"}})") == "drive.type");
  CHECK(failing_field(R"({"system": {"omega": 1}})") == "system.omega");
  CHECK(failing_field(R"({"plot": {}})") == "plot");
  CHECK(failing_field(R"({"system": 3})") == "system");
  CHECK(failing_field(R"({"drive": {"type": "uniform_accel", "accel_m_s2": 1e15}})") == "");
}

TEST_CASE("malformed text is a parse error") {
  CHECK_THROWS_AS(parse_config_text("{\"system\": "), ParseError);
  CHECK_THROWS_AS(parse_config_text("not json"), ParseError);
  CHECK_THROWS_AS(parse_config("/nonexistent/dir/config.json"), ParseError);
}

TEST_CASE("serialization round trip (property)") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Config c;
    c.system.omega_ghz = 1.0 + 9.0 * u(rng);
    c.system.omega_q_ghz = 1.0 + 9.0 * u(rng);
    c.system.g0_over_omega = 0.2 * u(rng);
    c.system.gamma_khz = 1000.0 * u(rng);
    c.system.n_max = 1 + static_cast<int>(60 * u(rng));
    c.drive.type = static_cast<DriveType>(i % 3);
    c.drive.f0_rad = pi * u(rng);
    c.drive.delta_f_rad = pi * u(rng);
    c.drive.omega_d_over_omega = 0.1 + 3 * u(rng);
    if (i % 2 == 0) c.drive.accel_m_s2 = 1e15 * (0.1 + u(rng));
    c.drive.x_offset_m = u(rng) * 1e-3;
    c.grid.t_end_ns = 1.0 + 100 * u(rng);
    c.grid.steps_per_period = 200 + static_cast<int>(600 * u(rng));
    c.output.csv_path = "out/run" + std::to_string(i) + ".csv";
    if (c.drive.type == DriveType::uniform_accel && !c.drive.accel_m_s2) c.drive.accel_m_s2 = 1e15;
    const Config back = parse_config_text(c.to_json().dump());
    CHECK(back == c);
  }
}

TEST_CASE("field overrides parse by type") {
  Config c;
  c.set("system.n_max", "12");
  CHECK(c.system.n_max == 12);
  c.set("delta_f_rad", "2.5");
  CHECK(c.drive.delta_f_rad == 2.5);
  c.set("drive.type", "constant");
  CHECK(c.drive.type == DriveType::constant);
  c.set("drive.accel_m_s2", "3e15");
  CHECK(c.drive.accel_m_s2 == 3e15);
  c.set("drive.accel_m_s2", "null");
  CHECK_FALSE(c.drive.accel_m_s2.has_value());
  c.set("output.csv_path", "x.csv");
  CHECK(c.output.csv_path == "x.csv");
  c.set("grid.t_end_ns", 12.5);
  CHECK(c.grid.t_end_ns == 12.5);
  CHECK_THROWS_AS(c.set("system.n_max", "many"), ValidationError);
  CHECK_THROWS_AS(c.set("system.n_max", "3.5"), ValidationError);
  CHECK_THROWS_AS(c.set("system.bogus", "1"), ValidationError);
  CHECK_THROWS_AS(c.set("drive.type", 1.0), ValidationError);
  CHECK(Config::keys().size() == 18);
}

TEST_CASE("unit conversion to internal units") {
  Config c;
  c.system.gamma_khz = 400.0;
  const SystemParams p = c.system_params();
  CHECK(p.omega == 1.0);
  CHECK(p.omega_q == 1.0);
  CHECK(p.g0 == 0.01);
  CHECK(p.gamma == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(c.omega_rad_per_ns() == doctest::Approx(8 * pi));
  CHECK(c.wavevector() == doctest::Approx(2 * pi * 4e9 / 1.2e8));

  const TimeGrid g = c.time_grid();
  CHECK(g.t0 == 0.0);
  CHECK(g.t1 == doctest::Approx(70.0 * 8 * pi));
  CHECK(g.dt == doctest::Approx(pi / 200));  // omega_d = 2 is the fastest frequency

  c.drive.type = DriveType::uniform_accel;
  c.drive.accel_m_s2 = 1e15;
  const Window w = c.perturbative_window();
  CHECK(w.t0 == doctest::Approx(-4 * pi));
  CHECK(w.t1 == doctest::Approx(4 * pi));
  const AccelTrajectory tr = c.accel_trajectory();
  CHECK(tr.t0_ns == -0.5);
  CHECK(tr.t1_ns == 0.5);
  CHECK(tr.accel == 1e15);
}

TEST_CASE("config file on disk") {
  const auto path = std::filesystem::temp_directory_path() / "relmotion_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"system": {"n_max": 9}, "grid": {"t_end_ns": 2}})";
  }
  const Config c = parse_config(path);
  CHECK(c.system.n_max == 9);
  CHECK(c.grid.t_end_ns == 2.0);
  std::filesystem::remove(path);
}
