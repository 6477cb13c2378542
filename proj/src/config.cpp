#include "relmotion/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace relmotion {

using nlohmann::json;

namespace {

constexpr double kMaxCouplingRatio = 0.2;
constexpr int kMaxFockTruncation = 200;

enum class Kind { number, integer, optional_number, string, drive_type };

struct FieldInfo {
  std::string_view section;
  std::string_view name;
  Kind kind;
};

// Schema in serialization order.
constexpr FieldInfo kFields[] = {
    {"system", "omega_ghz", Kind::number},
    {"system", "omega_q_ghz", Kind::number},
    {"system", "g0_over_omega", Kind::number},
    {"system", "gamma_khz", Kind::number},
    {"system", "n_max", Kind::integer},
    {"drive", "type", Kind::drive_type},
    {"drive", "f0_rad", Kind::number},
    {"drive", "delta_f_rad", Kind::number},
    {"drive", "omega_d_over_omega", Kind::number},
    {"drive", "accel_m_s2", Kind::optional_number},
    {"drive", "c_sim_m_s", Kind::number},
    {"drive", "duration_ns", Kind::number},
    {"drive", "x_offset_m", Kind::number},
    {"grid", "t_end_ns", Kind::number},
    {"grid", "steps_per_period", Kind::integer},
    {"grid", "record_stride", Kind::integer},
    {"output", "csv_path", Kind::string},
    {"output", "json_path", Kind::string},
};

std::string dotted(std::string_view section, std::string_view name) {
  return std::string(section) + "." + std::string(name);
}

const FieldInfo& find_field(std::string_view key) {
  for (const auto& f : kFields) {
    if (key == dotted(f.section, f.name) || key == f.name) return f;
  }
  throw ValidationError(std::string(key), "unknown configuration key");
}

DriveType parse_drive_type(const std::string& s, const std::string& field) {
  if (s == "harmonic") return DriveType::harmonic;
  if (s == "uniform_accel") return DriveType::uniform_accel;
  if (s == "constant") return DriveType::constant;
  throw ValidationError(field, "must be one of harmonic, uniform_accel, constant (got '" + s +
                                   "')");
}

void require_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

void require_positive(double v, const std::string& field) {
  require_finite(v, field);
  if (!(v > 0.0)) throw ValidationError(field, "must be > 0");
}

class SectionReader {
 public:
  SectionReader(const json& root, std::string_view section) : section_(section) {
    if (!root.contains(std::string(section))) return;
    const json& s = root.at(std::string(section));
    if (!s.is_object()) throw ValidationError(std::string(section), "must be an object");
    obj_ = &s;
    for (const auto& [key, value] : s.items()) {
      bool known = false;
      for (const auto& f : kFields) known = known || (f.section == section && f.name == key);
      if (!known) throw ValidationError(dotted(section, key), "unknown configuration key");
    }
  }

  void number(std::string_view name, double& out) const {
    if (const json* v = get(name)) {
      if (!v->is_number()) throw ValidationError(dotted(section_, name), "must be a number");
      out = v->get<double>();
    }
  }

  void optional_number(std::string_view name, std::optional<double>& out) const {
    if (const json* v = get(name)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw ValidationError(dotted(section_, name), "must be a number or null");
      }
    }
  }

  void integer(std::string_view name, int& out) const {
    if (const json* v = get(name)) {
      const bool integral = v->is_number_integer() ||
                            (v->is_number_float() && std::floor(v->get<double>()) == v->get<double>());
      if (!integral) throw ValidationError(dotted(section_, name), "must be an integer");
      const double d = v->get<double>();
      if (std::abs(d) > 1e9) throw ValidationError(dotted(section_, name), "out of range");
      out = static_cast<int>(d);
    }
  }

  void string(std::string_view name, std::string& out) const {
    if (const json* v = get(name)) {
      if (!v->is_string()) throw ValidationError(dotted(section_, name), "must be a string");
      out = v->get<std::string>();
    }
  }

 private:
  const json* get(std::string_view name) const {
    if (obj_ == nullptr) return nullptr;
    auto it = obj_->find(std::string(name));
    return it == obj_->end() ? nullptr : &*it;
  }

  std::string_view section_;
  const json* obj_ = nullptr;
};

}  // namespace

std::string_view to_string(DriveType t) {
  switch (t) {
    case DriveType::harmonic: return "harmonic";
    case DriveType::uniform_accel: return "uniform_accel";
    case DriveType::constant: return "constant";
  }
  return "harmonic";
}

void Config::validate() const {
  require_positive(system.omega_ghz, "system.omega_ghz");
  require_positive(system.omega_q_ghz, "system.omega_q_ghz");
  require_finite(system.g0_over_omega, "system.g0_over_omega");
  if (system.g0_over_omega < 0.0) throw ValidationError("system.g0_over_omega", "must be >= 0");
  if (system.g0_over_omega > kMaxCouplingRatio) {
    throw ValidationError("system.g0_over_omega", "exceeds the 0.2 cap");
  }
  require_finite(system.gamma_khz, "system.gamma_khz");
  if (system.gamma_khz < 0.0) throw ValidationError("system.gamma_khz", "must be >= 0");
  if (system.n_max < 1 || system.n_max > kMaxFockTruncation) {
    throw ValidationError("system.n_max", "must be in [1, 200]");
  }

  require_finite(drive.f0_rad, "drive.f0_rad");
  require_finite(drive.delta_f_rad, "drive.delta_f_rad");
  if (drive.delta_f_rad < 0.0) throw ValidationError("drive.delta_f_rad", "must be >= 0");
  require_positive(drive.omega_d_over_omega, "drive.omega_d_over_omega");
  require_positive(drive.c_sim_m_s, "drive.c_sim_m_s");
  require_positive(drive.duration_ns, "drive.duration_ns");
  require_finite(drive.x_offset_m, "drive.x_offset_m");
  if (drive.type == DriveType::uniform_accel) {
    if (!drive.accel_m_s2) {
      throw ValidationError("drive.accel_m_s2", "required for drive type uniform_accel");
    }
    require_positive(*drive.accel_m_s2, "drive.accel_m_s2");
  } else if (drive.accel_m_s2) {
    require_finite(*drive.accel_m_s2, "drive.accel_m_s2");
  }

  require_positive(grid.t_end_ns, "grid.t_end_ns");
  if (grid.steps_per_period < TimeGrid::kMinStepsPerPeriod) {
    throw ValidationError("grid.steps_per_period", "must be >= 200");
  }
  if (grid.record_stride < 1) throw ValidationError("grid.record_stride", "must be >= 1");
}

json Config::to_json() const {
  json j;
  j["system"] = {{"omega_ghz", system.omega_ghz},
                 {"omega_q_ghz", system.omega_q_ghz},
                 {"g0_over_omega", system.g0_over_omega},
                 {"gamma_khz", system.gamma_khz},
                 {"n_max", system.n_max}};
  j["drive"] = {{"type", std::string(to_string(drive.type))},
                {"f0_rad", drive.f0_rad},
                {"delta_f_rad", drive.delta_f_rad},
                {"omega_d_over_omega", drive.omega_d_over_omega},
                {"accel_m_s2", drive.accel_m_s2 ? json(*drive.accel_m_s2) : json(nullptr)},
                {"c_sim_m_s", drive.c_sim_m_s},
                {"duration_ns", drive.duration_ns},
                {"x_offset_m", drive.x_offset_m}};
  j["grid"] = {{"t_end_ns", grid.t_end_ns},
               {"steps_per_period", grid.steps_per_period},
               {"record_stride", grid.record_stride}};
  j["output"] = {{"csv_path", output.csv_path}, {"json_path", output.json_path}};
  return j;
}

Config Config::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config", "top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "system" && key != "drive" && key != "grid" && key != "output") {
      throw ValidationError(key, "unknown configuration key");
    }
  }
  Config c;
  const SectionReader sys(j, "system");
  sys.number("omega_ghz", c.system.omega_ghz);
  sys.number("omega_q_ghz", c.system.omega_q_ghz);
  sys.number("g0_over_omega", c.system.g0_over_omega);
  sys.number("gamma_khz", c.system.gamma_khz);
  sys.integer("n_max", c.system.n_max);

  const SectionReader drv(j, "drive");
  std::string type(to_string(c.drive.type));
  drv.string("type", type);
  c.drive.type = parse_drive_type(type, "drive.type");
  drv.number("f0_rad", c.drive.f0_rad);
  drv.number("delta_f_rad", c.drive.delta_f_rad);
  drv.number("omega_d_over_omega", c.drive.omega_d_over_omega);
  drv.optional_number("accel_m_s2", c.drive.accel_m_s2);
  drv.number("c_sim_m_s", c.drive.c_sim_m_s);
  drv.number("duration_ns", c.drive.duration_ns);
  drv.number("x_offset_m", c.drive.x_offset_m);

  const SectionReader grd(j, "grid");
  grd.number("t_end_ns", c.grid.t_end_ns);
  grd.integer("steps_per_period", c.grid.steps_per_period);
  grd.integer("record_stride", c.grid.record_stride);

  const SectionReader out(j, "output");
  out.string("csv_path", c.output.csv_path);
  out.string("json_path", c.output.json_path);
  return c;
}

void Config::set(std::string_view key, std::string_view value) {
  const FieldInfo& f = find_field(key);
  const std::string field = dotted(f.section, f.name);
  json parsed;
  switch (f.kind) {
    case Kind::string:
    case Kind::drive_type:
      parsed = std::string(value);
      break;
    case Kind::optional_number:
      if (value == "null" || value.empty()) {
        parsed = nullptr;
        break;
      }
      [[fallthrough]];
    case Kind::number:
    case Kind::integer: {
      double d = 0.0;
      const auto* end = value.data() + value.size();
      const auto [ptr, ec] = std::from_chars(value.data(), end, d);
      if (ec != std::errc() || ptr != end) {
        throw ValidationError(field, "expected a number, got '" + std::string(value) + "'");
      }
      parsed = d;
      break;
    }
  }
  json j = to_json();
  j[std::string(f.section)][std::string(f.name)] = parsed;
  *this = from_json(j);
}

void Config::set(std::string_view key, double value) {
  const FieldInfo& f = find_field(key);
  if (f.kind == Kind::string || f.kind == Kind::drive_type) {
    throw ValidationError(dotted(f.section, f.name), "is not numeric");
  }
  json j = to_json();
  j[std::string(f.section)][std::string(f.name)] = value;
  *this = from_json(j);
}

std::vector<std::string> Config::keys() {
  std::vector<std::string> out;
  for (const auto& f : kFields) out.push_back(dotted(f.section, f.name));
  return out;
}

double Config::omega_rad_per_ns() const { return 2.0 * std::numbers::pi * system.omega_ghz; }

SystemParams Config::system_params() const {
  SystemParams p;
  p.omega = 1.0;
  p.omega_q = system.omega_q_ghz / system.omega_ghz;
  p.g0 = system.g0_over_omega;
  // gamma / 2 pi in kHz against omega / 2 pi in GHz.
  p.gamma = system.gamma_khz * 1e-6 / system.omega_ghz;
  p.n_max = system.n_max;
  return p;
}

double Config::wavevector() const {
  return mode_wavevector(omega_rad_per_ns() * 1e9, kGroupVelocity);
}

AccelTrajectory Config::accel_trajectory() const {
  AccelTrajectory tr;
  tr.accel = drive.accel_m_s2.value_or(0.0);
  tr.c_sim = drive.c_sim_m_s;
  tr.k = wavevector();
  tr.t0_ns = -0.5 * drive.duration_ns;
  tr.t1_ns = 0.5 * drive.duration_ns;
  tr.x_offset = drive.x_offset_m;
  return tr;
}

FluxProfile Config::flux_profile() const {
  switch (drive.type) {
    case DriveType::harmonic:
      return FluxProfile::harmonic({drive.f0_rad, drive.delta_f_rad, drive.omega_d_over_omega});
    case DriveType::constant:
      return FluxProfile::constant(drive.f0_rad);
    case DriveType::uniform_accel:
      return FluxProfile::accelerated(accel_trajectory(), ns_per_time_unit());
  }
  return FluxProfile::constant(drive.f0_rad);
}

Window Config::perturbative_window() const {
  if (drive.type == DriveType::uniform_accel) {
    const double half = 0.5 * drive.duration_ns * omega_rad_per_ns();
    return {-half, half};
  }
  return {0.0, grid.t_end_ns * omega_rad_per_ns()};
}

TimeGrid Config::time_grid() const {
  const Window w = perturbative_window();
  const double max_freq = max_system_frequency(system_params(), flux_profile());
  return TimeGrid::per_period(w.t0, w.t1, max_freq, grid.steps_per_period,
                              static_cast<std::size_t>(grid.record_stride));
}

namespace {

Config from_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed configuration JSON: ") + e.what());
  }
  return Config::from_json(j);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Config parse_config_text(std::string_view text) {
  Config c = from_text(text);
  c.validate();
  return c;
}

Config parse_config(const std::filesystem::path& path) { return parse_config_text(slurp(path)); }

Config read_config(const std::filesystem::path& path) { return from_text(slurp(path)); }

}  // namespace relmotion
