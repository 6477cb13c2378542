// relmotion command-line driver.
//
// Exit codes: 0 all checks passed, 1 some check failed (or the integrator gave
// up), 2 parse error, 3 validation error, 4 I/O error.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "relmotion/relmotion.h"

namespace {

enum Exit { kOk = 0, kVerdictFail = 1, kParse = 2, kValidation = 3, kIo = 4 };

// Config keys exposed as --flags (dots and underscores become dashes after the section).
constexpr const char* kConfigKeys[] = {
    "system.omega_ghz",      "system.omega_q_ghz",   "system.g0_over_omega",
    "system.gamma_khz",      "system.n_max",         "drive.type",
    "drive.f0_rad",          "drive.delta_f_rad",    "drive.omega_d_over_omega",
    "drive.accel_m_s2",      "drive.c_sim_m_s",      "drive.duration_ns",
    "drive.x_offset_m",      "grid.t_end_ns",        "grid.steps_per_period",
    "grid.record_stride",    "output.csv_path",      "output.json_path",
};

std::string flag_name(const std::string& key) {
  std::string name = key.substr(key.find('.') + 1);
  for (char& c : name) {
    if (c == '_') c = '-';
  }
  if (name == "type") return "--drive-type";
  if (name == "csv-path") return "--csv";
  if (name == "json-path") return "--json";
  return "--" + name;
}

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;  // key -> raw text
  bool print_json = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "JSON configuration file");
  for (const char* key : kConfigKeys) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        flag_name(k), [&flags, k](const std::string& v) { flags.values[k] = v; },
        "override " + k);
  }
  cmd->add_flag("--print-json", flags.print_json, "print the JSON report to stdout");
}

int status_exit(rm_status s) {
  switch (s) {
    case RM_OK: return kOk;
    case RM_VERDICT_FAIL: return kVerdictFail;
    case RM_PARSE_ERROR: return kParse;
    case RM_VALIDATION_ERROR: return kValidation;
    case RM_IO_ERROR: return kIo;
    case RM_NUMERICAL_ERROR: return kVerdictFail;
    case RM_INVALID_ARGUMENT: return kValidation;
  }
  return kVerdictFail;
}

int report_error(rm_status s) {
  std::cerr << "error: " << rm_last_error() << "\n";
  return status_exit(s);
}

struct ConfigDeleter {
  void operator()(rm_config* c) const { rm_config_free(c); }
};
struct ReportDeleter {
  void operator()(rm_report* r) const { rm_report_free(r); }
};
using ConfigPtr = std::unique_ptr<rm_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<rm_report, ReportDeleter>;

// Defaults, then the file, then flags; validated at the end.
rm_status resolve_config(const ConfigFlags& flags, ConfigPtr& out) {
  rm_config* raw = nullptr;
  rm_status s = flags.config_path.empty() ? rm_config_default(&raw)
                                          : rm_config_read(flags.config_path.c_str(), &raw);
  if (s != RM_OK) return s;
  out.reset(raw);
  for (const auto& [key, value] : flags.values) {
    s = rm_config_set_string(out.get(), key.c_str(), value.c_str());
    if (s != RM_OK) return s;
  }
  return rm_config_validate(out.get());
}

void print_summary(const nlohmann::json& j, const std::string& indent = "") {
  std::cout << indent << j.value("scenario", "") ;
  if (j.contains("label")) std::cout << " [" << j["label"].get<std::string>() << "]";
  std::cout << ": " << (j.value("all_passed", false) ? "PASS" : "FAIL") << "\n";
  if (j.contains("error")) std::cout << indent << "  error: " << j["error"].get<std::string>() << "\n";
  for (const auto& c : j["checks"]) {
    std::cout << indent << "  " << (c["passed"].get<bool>() ? "PASS " : "FAIL ")
              << c["name"].get<std::string>() << " = " << c["value"].dump()
              << " (threshold " << c["threshold"].dump() << ")\n";
  }
  for (const auto& p : j["perturbative"]) {
    if (!p["label"].get<std::string>().empty()) continue;
    std::cout << indent << "  r_em = " << p["r_em"].dump() << ", r_abs = " << p["r_abs"].dump()
              << ", sigma_z_pert = " << p["sigma_z_pert"].dump()
              << ", n_pert = " << p["n_pert"].dump() << "\n";
  }
  if (j.contains("rows")) {
    for (const auto& row : j["rows"]) print_summary(row, indent + "  ");
  }
}

int finish_run(rm_status s, rm_report* raw, const ConfigFlags& flags) {
  if (s != RM_OK && s != RM_VERDICT_FAIL) return report_error(s);
  ReportPtr report(raw);
  char* text = nullptr;
  if (const rm_status js = rm_report_json(report.get(), &text); js != RM_OK) return report_error(js);
  const std::string json_text = text;
  rm_string_free(text);
  if (flags.print_json) {
    std::cout << json_text << "\n";
  } else {
    print_summary(nlohmann::json::parse(json_text));
  }
  if (const rm_status ws = rm_report_write(report.get(), nullptr, nullptr); ws != RM_OK) {
    return report_error(ws);
  }
  return status_exit(s);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size()) throw CLI::ValidationError("list", "not a number: '" + item + "'");
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit-cavity simulator for relativistic qubit motion in circuit QED"};
  app.set_version_flag("--version", rm_version());
  app.require_subcommand(1);

  ConfigFlags sim_flags, pert_flags, fig3_flags, fig4_flags, accel_flags, sweep_flags, conv_flags;

  auto* simulate = app.add_subcommand("simulate", "full dynamics from |g,0>");
  add_config_flags(simulate, sim_flags);

  auto* pert = app.add_subcommand("perturbative", "second-order emission/absorption coefficients");
  add_config_flags(pert, pert_flags);

  auto* reproduce = app.add_subcommand("reproduce", "canned experiments");
  reproduce->require_subcommand(1);

  std::string fig3_branch = "both";
  int fig_n_max = 0;
  int fig_spp = 0;
  double window_ns = 0.0;
  auto* fig3 = reproduce->add_subcommand("fig3", "anti-JC resonance, unitary and dissipative");
  add_config_flags(fig3, fig3_flags);
  fig3->add_option("--branch", fig3_branch, "unitary, dissipative or both")
      ->check(CLI::IsMember({"unitary", "dissipative", "both"}));
  fig3->add_option("--scenario-n-max", fig_n_max, "Fock truncation for every branch");
  fig3->add_option("--scenario-steps-per-period", fig_spp, "integrator steps per shortest period");

  std::string fig4_list;
  auto* fig4 = reproduce->add_subcommand("fig4", "parametric photon generation");
  add_config_flags(fig4, fig4_flags);
  fig4->add_option("--delta-f-list", fig4_list, "comma-separated drive amplitudes (rad)");
  fig4->add_option("--scenario-n-max", fig_n_max, "Fock truncation");
  fig4->add_option("--scenario-steps-per-period", fig_spp, "integrator steps per shortest period");
  fig4->add_option("--window-ns", window_ns, "longest window (ns)");

  double accel = 0.0;
  double duration = 0.0;
  auto* accel_cmd = reproduce->add_subcommand("accel", "uniform-acceleration emission estimate");
  add_config_flags(accel_cmd, accel_flags);
  accel_cmd->add_option("--accel", accel, "proper acceleration (m/s^2)");
  accel_cmd->add_option("--duration", duration, "window length (ns)");

  std::string axis;
  std::string values;
  std::string mode = "simulate";
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "one run per value of a config field");
  add_config_flags(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "config key, e.g. drive.delta_f_rad")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--mode", mode, "simulate or perturbative")
      ->check(CLI::IsMember({"simulate", "perturbative"}));
  sweep->add_option("--threads", threads, "worker threads (default RELMOTION_THREADS or cores)");

  std::string n_max_list;
  auto* converge = app.add_subcommand("converge", "Fock truncation audit");
  add_config_flags(converge, conv_flags);
  converge->add_option("--n-max-list", n_max_list, "comma-separated increasing n_max values")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  auto run = [&](const ConfigFlags& flags, auto&& call) -> int {
    ConfigPtr cfg;
    if (const rm_status s = resolve_config(flags, cfg); s != RM_OK) return report_error(s);
    rm_report* report = nullptr;
    const rm_status s = call(cfg.get(), &report);
    return finish_run(s, report, flags);
  };

  try {
    if (simulate->parsed()) {
      return run(sim_flags, [](rm_config* c, rm_report** r) { return rm_simulate(c, r); });
    }
    if (pert->parsed()) {
      return run(pert_flags, [](rm_config* c, rm_report** r) { return rm_perturbative(c, r); });
    }
    const rm_scenario_options opts{fig_n_max, window_ns, fig_spp};
    if (fig3->parsed()) {
      const int unitary = fig3_branch != "dissipative";
      const int dissipative = fig3_branch != "unitary";
      return run(fig3_flags, [&](rm_config* c, rm_report** r) {
        return rm_reproduce_fig3(c, unitary, dissipative, &opts, r);
      });
    }
    if (fig4->parsed()) {
      const std::vector<double> list = parse_list(fig4_list);
      return run(fig4_flags, [&](rm_config* c, rm_report** r) {
        return rm_reproduce_fig4(c, list.data(), list.size(), &opts, r);
      });
    }
    if (accel_cmd->parsed()) {
      return run(accel_flags, [&](rm_config* c, rm_report** r) {
        return rm_reproduce_accel(c, accel, duration, r);
      });
    }
    if (sweep->parsed()) {
      const std::vector<double> list = parse_list(values);
      const rm_sweep_mode m = mode == "perturbative" ? RM_SWEEP_PERTURBATIVE : RM_SWEEP_SIMULATE;
      return run(sweep_flags, [&](rm_config* c, rm_report** r) {
        return rm_sweep(c, axis.c_str(), list.data(), list.size(), m, threads, r);
      });
    }
    if (converge->parsed()) {
      std::vector<int> list;
      for (double v : parse_list(n_max_list)) list.push_back(static_cast<int>(v));
      return run(conv_flags, [&](rm_config* c, rm_report** r) {
        return rm_converge(c, list.data(), list.size(), r);
      });
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}
