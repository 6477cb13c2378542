#pragma once

// Run configuration: JSON schema, defaults, validation and conversion to the
// internal dimensionless units (cavity frequency = 1).
//
// {
//   "system": {"omega_ghz", "omega_q_ghz", "g0_over_omega", "gamma_khz", "n_max"},
//   "drive":  {"type": "harmonic" | "uniform_accel" | "constant", "f0_rad", "delta_f_rad",
//              "omega_d_over_omega", "accel_m_s2", "c_sim_m_s", "duration_ns", "x_offset_m"},
//   "grid":   {"t_end_ns", "steps_per_period", "record_stride"},
//   "output": {"csv_path", "json_path"}
// }
//
// Frequencies are given as f = omega / 2 pi (GHz, kHz). Unknown keys are rejected.

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "relmotion/analysis.hpp"
#include "relmotion/dynamics.hpp"
#include "relmotion/model.hpp"

namespace relmotion {

enum class DriveType { harmonic, uniform_accel, constant };

std::string_view to_string(DriveType t);

struct SystemConfig {
  double omega_ghz = 4.0;
  double omega_q_ghz = 4.0;
  double g0_over_omega = 0.01;
  double gamma_khz = 0.0;
  int n_max = 5;

  bool operator==(const SystemConfig&) const = default;
};

struct DriveConfig {
  DriveType type = DriveType::harmonic;
  double f0_rad = std::numbers::pi / 2;
  double delta_f_rad = std::numbers::pi / 2;
  double omega_d_over_omega = 2.0;
  std::optional<double> accel_m_s2;
  double c_sim_m_s = kGroupVelocity;
  double duration_ns = 1.0;
  double x_offset_m = 0.0;

  bool operator==(const DriveConfig&) const = default;
};

struct GridConfig {
  double t_end_ns = 70.0;
  int steps_per_period = TimeGrid::kMinStepsPerPeriod;
  int record_stride = 10;

  bool operator==(const GridConfig&) const = default;
};

struct OutputConfig {
  std::string csv_path;
  std::string json_path;

  bool operator==(const OutputConfig&) const = default;
};

struct Config {
  SystemConfig system;
  DriveConfig drive;
  GridConfig grid;
  OutputConfig output;

  bool operator==(const Config&) const = default;

  /// Throws ValidationError naming the offending field ("section.key").
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing keys take defaults. Throws ValidationError on unknown keys or wrong
  /// types. Ranges are checked by validate().
  static Config from_json(const nlohmann::json& j);

  /// Override one field, e.g. set("system.n_max", "12"). The text is parsed
  /// according to the field's type.
  void set(std::string_view key, std::string_view value);
  void set(std::string_view key, double value);

  static std::vector<std::string> keys();

  // Unit conversion.
  double omega_rad_per_ns() const;
  double ns_per_time_unit() const { return 1.0 / omega_rad_per_ns(); }
  SystemParams system_params() const;
  FluxProfile flux_profile() const;
  /// Mode wave vector k = omega / v for the line's group velocity (rad/m).
  double wavevector() const;
  AccelTrajectory accel_trajectory() const;
  /// Simulation grid in internal units: [0, t_end] for harmonic/constant drives,
  /// the symmetric [-duration/2, duration/2] window for uniform acceleration.
  TimeGrid time_grid() const;
  /// Window used for the perturbative coefficients.
  Window perturbative_window() const;
};

Config parse_config_text(std::string_view text);
Config parse_config(const std::filesystem::path& path);
/// parse_config without the final validate().
Config read_config(const std::filesystem::path& path);

}  // namespace relmotion
