#ifndef RELMOTION_RELMOTION_H
#define RELMOTION_RELMOTION_H

/* C interface to the relmotion simulator.
 *
 * Handles are opaque. Every call returning rm_status leaves a description of
 * the most recent failure in rm_last_error() (per thread). Strings returned
 * through char** are owned by the caller and released with rm_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(RELMOTION_BUILDING_LIBRARY)
#    define RM_API __declspec(dllexport)
#  else
#    define RM_API __declspec(dllimport)
#  endif
#else
#  define RM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rm_status {
  RM_OK = 0,
  RM_VERDICT_FAIL = 1, /* computation finished, some check failed */
  RM_PARSE_ERROR = 2,
  RM_VALIDATION_ERROR = 3,
  RM_IO_ERROR = 4,
  RM_NUMERICAL_ERROR = 5,
  RM_INVALID_ARGUMENT = 6
} rm_status;

typedef struct rm_config rm_config;
typedef struct rm_report rm_report;

typedef enum rm_sweep_mode { RM_SWEEP_SIMULATE = 0, RM_SWEEP_PERTURBATIVE = 1 } rm_sweep_mode;

/* Overrides for the canned experiments; zero keeps the built-in value.
 * n_max and steps_per_period apply to every branch; t_end_ns is the Fig. 4
 * window cap (Fig. 3 windows are set in Rabi periods). */
typedef struct rm_scenario_options {
  int n_max;
  double t_end_ns;
  int steps_per_period;
} rm_scenario_options;

RM_API const char* rm_version(void);
RM_API const char* rm_last_error(void);
/* Field named by the last validation error, or "" */
RM_API const char* rm_last_error_field(void);

RM_API rm_status rm_config_default(rm_config** out);
RM_API rm_status rm_config_load(const char* path, rm_config** out);
RM_API rm_status rm_config_parse(const char* json_text, rm_config** out);
/* Parses and type-checks a file without range validation, so overrides can be
 * applied before rm_config_validate. */
RM_API rm_status rm_config_read(const char* path, rm_config** out);
RM_API rm_status rm_config_set_number(rm_config* cfg, const char* key, double value);
RM_API rm_status rm_config_set_string(rm_config* cfg, const char* key, const char* value);
RM_API rm_status rm_config_validate(const rm_config* cfg);
RM_API rm_status rm_config_to_json(const rm_config* cfg, char** out);
RM_API void rm_config_free(rm_config* cfg);

/* Run functions set *out on RM_OK and RM_VERDICT_FAIL. */
RM_API rm_status rm_simulate(const rm_config* cfg, rm_report** out);
RM_API rm_status rm_perturbative(const rm_config* cfg, rm_report** out);
RM_API rm_status rm_reproduce_fig3(const rm_config* cfg, int unitary, int dissipative,
                                   const rm_scenario_options* opts, rm_report** out);
RM_API rm_status rm_reproduce_fig4(const rm_config* cfg, const double* delta_f, size_t count,
                                   const rm_scenario_options* opts, rm_report** out);
RM_API rm_status rm_reproduce_accel(const rm_config* cfg, double accel_m_s2, double duration_ns,
                                    rm_report** out);
RM_API rm_status rm_sweep(const rm_config* cfg, const char* axis, const double* values,
                          size_t count, rm_sweep_mode mode, unsigned threads, rm_report** out);
RM_API rm_status rm_converge(const rm_config* cfg, const int* n_max_list, size_t count,
                             rm_report** out);

/* 1 when every check passed and no row failed. */
RM_API int rm_report_all_passed(const rm_report* report);
RM_API rm_status rm_report_json(const rm_report* report, char** out);
/* Writes CSV/JSON to the output paths of the report's config, or to the given
 * paths when non-NULL. */
RM_API rm_status rm_report_write(const rm_report* report, const char* csv_path,
                                 const char* json_path);
RM_API void rm_report_free(rm_report* report);

RM_API void rm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RELMOTION_RELMOTION_H */
