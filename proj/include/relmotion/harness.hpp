#pragma once

// Canned experiments, parameter sweeps and truncation audits. Every experiment
// returns an ExperimentReport carrying the resolved config, the computed series,
// and one verdict per check.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relmotion/analysis.hpp"
#include "relmotion/config.hpp"
#include "relmotion/dynamics.hpp"

namespace relmotion {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct LabeledSeries {
  std::string label;  // empty for the single series of a plain run
  SimResult result;
  double ns_per_time_unit = 1.0;
};

struct LabeledPerturbative {
  std::string label;
  PerturbativeResult result;
};

struct ExperimentReport {
  std::string scenario;
  std::string label;  // row label inside a sweep or multi-run experiment
  Config config;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<LabeledSeries> series;
  std::vector<LabeledPerturbative> perturbative;
  std::vector<Check> checks;
  std::vector<ExperimentReport> rows;
  double wall_seconds = 0.0;
  std::string error;  // set when the run (or sweep row) failed

  /// No error, every check passed, and every row passed.
  bool all_passed() const;
  const Check* find_check(const std::string& name) const;
  const LabeledSeries* find_series(const std::string& label) const;
};

/// Full dynamics from |g, 0>. gamma = 0 integrates the Schrodinger equation,
/// gamma > 0 the Lindblad equation.
SimResult run_dynamics(const Config& cfg, const EvolveOptions& opts = {});
ExperimentReport simulate(const Config& cfg);
ExperimentReport perturbative_report(const Config& cfg);

struct Fig3Options {
  bool unitary = true;
  bool dissipative = true;
  int n_max_unitary = 5;
  int n_max_dissipative = 10;
  int truncation_margin = 5;     // 0 disables the n_max + margin rerun
  double rabi_periods_unitary = 3.0;
  double rabi_periods_dissipative = 24.0;
  int steps_per_period_unitary = 200;
  int steps_per_period_dissipative = 200;
  double gamma_khz = 400.0;
};

/// Anti-JC resonance experiment. Drive, frequencies and g0 come from `base`.
ExperimentReport reproduce_fig3(const Config& base, const Fig3Options& opts = {});

struct Fig4Options {
  std::vector<double> delta_f_list;  // empty: {pi, 0.9 pi, 0.8 pi}
  int n_max = 40;
  int truncation_margin = 5;
  double t_max_ns = 500.0;
  double n_ph_stop = 3.0;
  int steps_per_period = 200;
  double gamma_khz = 400.0;
};

/// Parametric generation at f0 = pi, omega_d = omega. The window ends at the
/// first recorded sample where the largest delta_f reaches n_ph_stop, or at
/// t_max_ns; all rows share it.
ExperimentReport reproduce_fig4(const Config& base, const Fig4Options& opts = {});

/// Perturbative coefficients for a symmetric window of `duration_ns` around
/// closest approach under constant proper acceleration.
PerturbativeResult uniform_accel_experiment(const Config& base, double accel_m_s2,
                                            double duration_ns);

struct AccelOptions {
  double accel_m_s2 = 1e15;
  double duration_ns = 1.0;
  int scan_points = 10;  // R_em over accelerations in [accel / 2, accel]
};

ExperimentReport reproduce_accel(const Config& base, const AccelOptions& opts = {});

enum class SweepMode { simulate, perturbative };

/// One row per value with `axis` (a Config key) set to that value. Rows run
/// concurrently on up to `threads` workers (0: RELMOTION_THREADS or the core
/// count). A failing row records its error and does not stop the sweep.
ExperimentReport sweep(const Config& base, const std::string& axis,
                       const std::vector<double>& values, SweepMode mode = SweepMode::simulate,
                       unsigned threads = 0);

/// Worker count from RELMOTION_THREADS, else the hardware concurrency.
unsigned default_thread_count();

/// Largest |n_ph| difference between two runs on the same sample times.
double max_n_ph_difference(const SimResult& a, const SimResult& b);

inline constexpr double kTruncationTolerance = 1e-4;

/// Reruns `cfg` for each n_max (increasing) and recommends the smallest whose
/// n_ph(t) differs from the next by <= 1e-4 everywhere. The recommendation is
/// parameters["recommended_n_max"] (null when none converged).
ExperimentReport truncation_convergence(const Config& cfg, const std::vector<int>& n_max_list);

/// Full dynamics against second-order perturbation theory at weak coupling:
/// |p_e(t) - R_em(t)| <= 0.1 R_em(t) wherever R_em(t) <= r_em_limit.
ExperimentReport weak_coupling_consistency(const Config& base, double g0_over_omega = 1e-3,
                                           double r_em_limit = 1e-3);

}  // namespace relmotion
