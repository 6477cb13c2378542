#include "relmotion/relmotion.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "relmotion/harness.hpp"
#include "relmotion/report_io.hpp"

struct rm_config {
  relmotion::Config value;
};

struct rm_report {
  relmotion::ExperimentReport value;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_field;

void set_error(std::string msg, std::string field = {}) {
  g_last_error = std::move(msg);
  g_last_field = std::move(field);
}

void clear_error() {
  g_last_error.clear();
  g_last_field.clear();
}

template <class F>
rm_status guarded(F&& fn) {
  clear_error();
  try {
    return fn();
  } catch (const relmotion::ValidationError& e) {
    set_error(e.what(), e.field());
    return RM_VALIDATION_ERROR;
  } catch (const relmotion::ParseError& e) {
    set_error(e.what());
    return RM_PARSE_ERROR;
  } catch (const relmotion::IoError& e) {
    set_error(e.what());
    return RM_IO_ERROR;
  } catch (const relmotion::NumericalError& e) {
    set_error(e.what());
    return RM_NUMERICAL_ERROR;
  } catch (const relmotion::Error& e) {
    set_error(e.what());
    return RM_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return RM_NUMERICAL_ERROR;
  } catch (const std::exception& e) {
    set_error(e.what());
    return RM_INVALID_ARGUMENT;
  }
}

rm_status null_argument(const char* what) {
  set_error(std::string("null argument: ") + what);
  return RM_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rm_status finish(relmotion::ExperimentReport&& rep, rm_report** out) {
  const bool passed = rep.all_passed();
  *out = new rm_report{std::move(rep)};
  return passed ? RM_OK : RM_VERDICT_FAIL;
}

}  // namespace

extern "C" {

const char* rm_version(void) { return "0.1.0"; }

const char* rm_last_error(void) { return g_last_error.c_str(); }

const char* rm_last_error_field(void) { return g_last_field.c_str(); }

rm_status rm_config_default(rm_config** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rm_config{};
    return RM_OK;
  });
}

rm_status rm_config_load(const char* path, rm_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rm_config{relmotion::parse_config(path)};
    return RM_OK;
  });
}

rm_status rm_config_parse(const char* json_text, rm_config** out) {
  if (json_text == nullptr) return null_argument("json_text");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rm_config{relmotion::parse_config_text(json_text)};
    return RM_OK;
  });
}

rm_status rm_config_read(const char* path, rm_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rm_config{relmotion::read_config(path)};
    return RM_OK;
  });
}

rm_status rm_config_set_number(rm_config* cfg, const char* key, double value) {
  if (cfg == nullptr) return null_argument("cfg");
  if (key == nullptr) return null_argument("key");
  return guarded([&] {
    cfg->value.set(key, value);
    return RM_OK;
  });
}

rm_status rm_config_set_string(rm_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr) return null_argument("cfg");
  if (key == nullptr) return null_argument("key");
  if (value == nullptr) return null_argument("value");
  return guarded([&] {
    cfg->value.set(key, std::string_view(value));
    return RM_OK;
  });
}

rm_status rm_config_validate(const rm_config* cfg) {
  if (cfg == nullptr) return null_argument("cfg");
  return guarded([&] {
    cfg->value.validate();
    return RM_OK;
  });
}

rm_status rm_config_to_json(const rm_config* cfg, char** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = copy_string(cfg->value.to_json().dump(2));
    return RM_OK;
  });
}

void rm_config_free(rm_config* cfg) { delete cfg; }

rm_status rm_simulate(const rm_config* cfg, rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { return finish(relmotion::simulate(cfg->value), out); });
}

rm_status rm_perturbative(const rm_config* cfg, rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { return finish(relmotion::perturbative_report(cfg->value), out); });
}

rm_status rm_reproduce_fig3(const rm_config* cfg, int unitary, int dissipative,
                            const rm_scenario_options* opts, rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    relmotion::Fig3Options o;
    o.unitary = unitary != 0;
    o.dissipative = dissipative != 0;
    if (opts != nullptr) {
      if (opts->n_max > 0) o.n_max_unitary = o.n_max_dissipative = opts->n_max;
      if (opts->steps_per_period > 0) {
        o.steps_per_period_unitary = o.steps_per_period_dissipative = opts->steps_per_period;
      }
    }
    return finish(relmotion::reproduce_fig3(cfg->value, o), out);
  });
}

rm_status rm_reproduce_fig4(const rm_config* cfg, const double* delta_f, size_t count,
                            const rm_scenario_options* opts, rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  if (count > 0 && delta_f == nullptr) return null_argument("delta_f");
  return guarded([&] {
    relmotion::Fig4Options o;
    if (count > 0) o.delta_f_list.assign(delta_f, delta_f + count);
    if (opts != nullptr) {
      if (opts->n_max > 0) o.n_max = opts->n_max;
      if (opts->t_end_ns > 0.0) o.t_max_ns = opts->t_end_ns;
      if (opts->steps_per_period > 0) o.steps_per_period = opts->steps_per_period;
    }
    return finish(relmotion::reproduce_fig4(cfg->value, o), out);
  });
}

rm_status rm_reproduce_accel(const rm_config* cfg, double accel_m_s2, double duration_ns,
                             rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    relmotion::AccelOptions o;
    if (accel_m_s2 > 0.0) o.accel_m_s2 = accel_m_s2;
    if (duration_ns > 0.0) o.duration_ns = duration_ns;
    return finish(relmotion::reproduce_accel(cfg->value, o), out);
  });
}

rm_status rm_sweep(const rm_config* cfg, const char* axis, const double* values, size_t count,
                   rm_sweep_mode mode, unsigned threads, rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (axis == nullptr) return null_argument("axis");
  if (out == nullptr) return null_argument("out");
  if (count > 0 && values == nullptr) return null_argument("values");
  return guarded([&] {
    const std::vector<double> v(values, values + count);
    const auto m = mode == RM_SWEEP_PERTURBATIVE ? relmotion::SweepMode::perturbative
                                                 : relmotion::SweepMode::simulate;
    return finish(relmotion::sweep(cfg->value, axis, v, m, threads), out);
  });
}

rm_status rm_converge(const rm_config* cfg, const int* n_max_list, size_t count,
                      rm_report** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  if (count > 0 && n_max_list == nullptr) return null_argument("n_max_list");
  return guarded([&] {
    const std::vector<int> list(n_max_list, n_max_list + count);
    return finish(relmotion::truncation_convergence(cfg->value, list), out);
  });
}

int rm_report_all_passed(const rm_report* report) {
  return report != nullptr && report->value.all_passed() ? 1 : 0;
}

rm_status rm_report_json(const rm_report* report, char** out) {
  if (report == nullptr) return null_argument("report");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = copy_string(relmotion::to_json(report->value).dump(2));
    return RM_OK;
  });
}

rm_status rm_report_write(const rm_report* report, const char* csv_path, const char* json_path) {
  if (report == nullptr) return null_argument("report");
  return guarded([&] {
    relmotion::OutputConfig o = report->value.config.output;
    if (csv_path != nullptr) o.csv_path = csv_path;
    if (json_path != nullptr) o.json_path = json_path;
    relmotion::emit(report->value, o);
    return RM_OK;
  });
}

void rm_report_free(rm_report* report) { delete report; }

void rm_string_free(char* s) { std::free(s); }

}  // extern "C"
