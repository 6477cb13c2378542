#include "relmotion/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

namespace relmotion {

using nlohmann::json;

namespace {

constexpr double kNormDriftLimit = 1e-8;
constexpr double kTraceDeviationLimit = 1e-7;
constexpr double kMinEigenvalueLimit = -1e-8;
constexpr double kRabiPeriodTolerance = 0.05;
constexpr double kPeakExcitation = 0.9;
constexpr double kSingleExcitationTracking = 0.05;
constexpr double kFlatVacuum = 1e-6;
constexpr double kFig4PhotonThreshold = 2.0;
constexpr double kAccelRemLow = 1e-5;
constexpr double kAccelRemHigh = 1e-3;
constexpr double kPerturbativeTolerance = 0.1;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string prefixed(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

Check upper_bound_check(std::string name, double value, double limit) {
  return {std::move(name), value <= limit, value, limit, ""};
}

Check lower_bound_check(std::string name, double value, double limit) {
  return {std::move(name), value >= limit, value, limit, ""};
}

void add_integrity_checks(std::vector<Check>& checks, const SimResult& r, bool lindblad,
                          const std::string& prefix) {
  if (lindblad) {
    checks.push_back(upper_bound_check(prefixed(prefix, "trace_deviation"), r.max_norm_drift,
                                       kTraceDeviationLimit));
    checks.push_back(
        lower_bound_check(prefixed(prefix, "min_eigenvalue"), r.min_eigenvalue, kMinEigenvalueLimit));
  } else {
    checks.push_back(
        upper_bound_check(prefixed(prefix, "norm_drift"), r.max_norm_drift, kNormDriftLimit));
  }
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = default_thread_count();
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
}

// Runs `fn(cfg)` and turns any library error into a failed row.
template <class F>
ExperimentReport guarded_row(const Config& cfg, const std::string& label, F&& fn) {
  Stopwatch clock;
  ExperimentReport row;
  try {
    row = fn(cfg);
  } catch (const std::exception& e) {
    row = ExperimentReport{};
    row.scenario = "row";
    row.config = cfg;
    row.error = e.what();
  }
  row.label = label;
  row.wall_seconds = clock.seconds();
  return row;
}

double mean_over(const SimResult& r, const std::vector<double>& values, double t0, double t1) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.times[i] >= t0 && r.times[i] <= t1) {
      acc += values[i];
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : acc / static_cast<double>(count);
}

// Centered moving average over `width` samples.
std::vector<double> moving_average(const std::vector<double>& v, std::size_t width) {
  const std::size_t n = v.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
  std::vector<double> out(n);
  const std::size_t half = width / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, lo + std::max<std::size_t>(width, 1));
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

// Time of the first minimum of p_e after its first peak above 1/2, on the
// drive-period average. NaN when p_e never exceeds 1/2.
double measured_rabi_period(const SimResult& r, double smoothing_time) {
  if (r.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double spacing = r.times[1] - r.times[0];
  const auto width = static_cast<std::size_t>(std::max(1.0, std::round(smoothing_time / spacing)));
  const std::vector<double> s = moving_average(r.p_e, width);
  std::size_t i = 0;
  while (i < s.size() && s[i] <= 0.5) ++i;
  while (i < s.size() && s[i] > 0.5) ++i;
  if (i >= s.size()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t best = i;
  for (; i < s.size() && s[i] <= 0.5; ++i) {
    if (s[i] < s[best]) best = i;
  }
  return r.times[best] - r.times.front();
}

Config harmonic_config(const Config& base) {
  Config cfg = base;
  cfg.drive.type = DriveType::harmonic;
  return cfg;
}

HarmonicDrive harmonic_drive(const Config& cfg) {
  return {cfg.drive.f0_rad, cfg.drive.delta_f_rad, cfg.drive.omega_d_over_omega};
}

double anti_jc_coupling(const Config& cfg) {
  return std::abs(effective_coupling(harmonic_drive(cfg), cfg.system_params().g0, 1)) / 2.0;
}

bool is_decoupled(double lambda, double g0) { return !(lambda > 1e-9 * std::max(g0, 1e-300)); }

LabeledSeries labeled(std::string label, SimResult r, const Config& cfg) {
  return {std::move(label), std::move(r), cfg.ns_per_time_unit()};
}

void fig3_unitary(const Config& base, const Fig3Options& o, double lambda, ExperimentReport& rep) {
  Config cfg = harmonic_config(base);
  cfg.system.gamma_khz = 0.0;
  cfg.system.n_max = o.n_max_unitary;
  cfg.grid.steps_per_period = o.steps_per_period_unitary;
  const bool decoupled = is_decoupled(lambda, cfg.system.g0_over_omega);
  const double rabi_period = decoupled ? 0.0 : std::numbers::pi / lambda;
  if (!decoupled) cfg.grid.t_end_ns = o.rabi_periods_unitary * rabi_period * cfg.ns_per_time_unit();
  cfg.validate();

  SimResult full = run_dynamics(cfg);
  const PureState psi0 = PureState::basis(Qubit::ground, 0, cfg.system.n_max);
  SimResult reference = anti_jc_evolution(lambda, psi0, cfg.time_grid());

  add_integrity_checks(rep.checks, full, false, "unitary");
  if (decoupled) {
    const double peak = std::max(*std::max_element(full.p_e.begin(), full.p_e.end()),
                                 *std::max_element(full.n_ph.begin(), full.n_ph.end()));
    rep.checks.push_back(upper_bound_check("unitary.flat_vacuum", peak, kFlatVacuum));
  } else {
    const double drive_period = 2.0 * std::numbers::pi / cfg.drive.omega_d_over_omega;
    const double measured = measured_rabi_period(full, drive_period);
    const double rel = std::abs(measured - rabi_period) / rabi_period;
    Check period{"unitary.rabi_period", rel <= kRabiPeriodTolerance, rel, kRabiPeriodTolerance,
                 "measured " + format_value(measured) + " vs pi/lambda " +
                     format_value(rabi_period) + " (internal units)"};
    if (std::isnan(rel)) period.passed = false;
    rep.checks.push_back(period);

    const double first_cycle = std::isnan(measured) ? rabi_period : std::max(measured, rabi_period);
    double peak = 0.0;
    double tracking = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (full.times[i] - full.times.front() > first_cycle) break;
      peak = std::max(peak, full.p_e[i]);
      tracking = std::max(tracking, std::abs(full.p_e[i] - full.n_ph[i]));
    }
    rep.checks.push_back(lower_bound_check("unitary.peak_p_e", peak, kPeakExcitation));
    rep.checks.push_back(
        upper_bound_check("unitary.p_e_tracks_n_ph", tracking, kSingleExcitationTracking));
    rep.parameters["unitary_measured_rabi_period"] = measured;
  }

  if (o.truncation_margin > 0) {
    Config wider = cfg;
    wider.system.n_max += o.truncation_margin;
    const double diff = max_n_ph_difference(full, run_dynamics(wider));
    rep.checks.push_back(upper_bound_check("unitary.truncation", diff, kTruncationTolerance));
  }
  rep.series.push_back(labeled("unitary", std::move(full), cfg));
  rep.series.push_back(labeled("unitary_anti_jc", std::move(reference), cfg));
}

void fig3_dissipative(const Config& base, const Fig3Options& o, double lambda,
                      ExperimentReport& rep) {
  Config cfg = harmonic_config(base);
  cfg.system.gamma_khz = o.gamma_khz;
  cfg.system.n_max = o.n_max_dissipative;
  cfg.grid.steps_per_period = o.steps_per_period_dissipative;
  const bool decoupled = is_decoupled(lambda, cfg.system.g0_over_omega);
  const double rabi_period = decoupled ? 0.0 : std::numbers::pi / lambda;
  if (!decoupled) {
    cfg.grid.t_end_ns = o.rabi_periods_dissipative * rabi_period * cfg.ns_per_time_unit();
  }
  cfg.validate();

  SimResult full = run_dynamics(cfg);
  const PureState psi0 = PureState::basis(Qubit::ground, 0, cfg.system.n_max);
  SimResult reference =
      anti_jc_evolution(lambda, psi0, cfg.time_grid(), cfg.system_params().gamma);

  add_integrity_checks(rep.checks, full, cfg.system.gamma_khz > 0.0, "dissipative");
  if (decoupled) {
    const double peak = std::max(*std::max_element(full.p_e.begin(), full.p_e.end()),
                                 *std::max_element(full.n_ph.begin(), full.n_ph.end()));
    rep.checks.push_back(upper_bound_check("dissipative.flat_vacuum", peak, kFlatVacuum));
  } else {
    // Averages of n_ph over consecutive Rabi periods.
    std::vector<double> cycles;
    const double t0 = full.times.front();
    for (int k = 0; (k + 1) * rabi_period <= full.times.back() - t0 + 1e-9 * rabi_period; ++k) {
      cycles.push_back(mean_over(full, full.n_ph, t0 + k * rabi_period, t0 + (k + 1) * rabi_period));
    }
    double min_increment = std::numeric_limits<double>::infinity();
    for (std::size_t k = 2; k < cycles.size(); ++k) {
      min_increment = std::min(min_increment, cycles[k] - cycles[k - 1]);
    }
    const bool enough = cycles.size() >= 3;
    Check monotone{"dissipative.cycle_average_non_decreasing", enough && min_increment >= 0.0,
                   enough ? min_increment : 0.0, 0.0,
                   "smallest change of the Rabi-period average of n_ph after the first period"};
    rep.checks.push_back(monotone);
    const double best = cycles.empty() ? 0.0 : *std::max_element(cycles.begin(), cycles.end());
    Check growth{"dissipative.photon_growth", best > 1.0, best, 1.0,
                 "largest Rabi-period average of n_ph"};
    rep.checks.push_back(growth);
    rep.parameters["dissipative_cycle_averages"] = cycles;
  }

  if (o.truncation_margin > 0) {
    Config wider = cfg;
    wider.system.n_max += o.truncation_margin;
    const double diff = max_n_ph_difference(full, run_dynamics(wider));
    rep.checks.push_back(upper_bound_check("dissipative.truncation", diff, kTruncationTolerance));
  }
  rep.series.push_back(labeled("dissipative", std::move(full), cfg));
  rep.series.push_back(labeled("dissipative_anti_jc", std::move(reference), cfg));
}

}  // namespace

bool ExperimentReport::all_passed() const {
  if (!error.empty()) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  for (const auto& r : rows) {
    if (!r.all_passed()) return false;
  }
  return true;
}

const Check* ExperimentReport::find_check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const LabeledSeries* ExperimentReport::find_series(const std::string& label) const {
  for (const auto& s : series) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("RELMOTION_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double max_n_ph_difference(const SimResult& a, const SimResult& b) {
  if (a.size() != b.size()) {
    throw DimensionError("runs have different sample counts (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.n_ph[i] - b.n_ph[i]));
  return d;
}

SimResult run_dynamics(const Config& cfg, const EvolveOptions& opts) {
  cfg.validate();
  const SystemParams p = cfg.system_params();
  const FluxProfile fp = cfg.flux_profile();
  const TimeGrid grid = cfg.time_grid();
  const PureState psi0 = PureState::basis(Qubit::ground, 0, p.n_max);
  if (p.gamma > 0.0) return evolve_lindblad(p, fp, DensityMatrix::from_pure(psi0), grid, opts);
  return evolve_schrodinger(p, fp, psi0, grid, opts);
}

ExperimentReport simulate(const Config& cfg) {
  Stopwatch clock;
  ExperimentReport rep;
  rep.scenario = "simulate";
  rep.config = cfg;
  SimResult r = run_dynamics(cfg);
  add_integrity_checks(rep.checks, r, cfg.system.gamma_khz > 0.0, "");
  rep.series.push_back(labeled("", std::move(r), cfg));
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport perturbative_report(const Config& cfg) {
  Stopwatch clock;
  cfg.validate();
  ExperimentReport rep;
  rep.scenario = "perturbative";
  rep.config = cfg;
  const Window w = cfg.perturbative_window();
  const PerturbativeResult r = perturbative(cfg.system_params(), cfg.flux_profile(), w);
  rep.parameters["window"] = {w.t0, w.t1};
  rep.checks.push_back({"weak_coupling", r.weak_coupling,
                        cfg.system_params().g0 * (w.t1 - w.t0), 0.3,
                        "g0 times window length (internal units)"});
  rep.perturbative.push_back({"", r});
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport reproduce_fig3(const Config& base, const Fig3Options& o) {
  Stopwatch clock;
  const Config cfg = harmonic_config(base);
  cfg.validate();
  ExperimentReport rep;
  rep.scenario = "fig3";
  rep.config = cfg;
  const double c1 = effective_coupling(harmonic_drive(cfg), cfg.system_params().g0, 1);
  const double lambda = std::abs(c1) / 2.0;
  rep.parameters["c1"] = c1;
  rep.parameters["lambda"] = lambda;
  if (!is_decoupled(lambda, cfg.system.g0_over_omega)) {
    rep.parameters["rabi_period"] = std::numbers::pi / lambda;
    rep.parameters["rabi_period_ns"] = std::numbers::pi / lambda * cfg.ns_per_time_unit();
  }
  if (o.unitary) fig3_unitary(cfg, o, lambda, rep);
  if (o.dissipative) fig3_dissipative(cfg, o, lambda, rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport reproduce_fig4(const Config& base, const Fig4Options& o) {
  Stopwatch clock;
  std::vector<double> list = o.delta_f_list;
  if (list.empty()) list = {std::numbers::pi, 0.9 * std::numbers::pi, 0.8 * std::numbers::pi};
  for (double df : list) {
    if (!(df > 0.0 && df <= std::numbers::pi)) {
      throw InvalidArgument("reproduce_fig4: delta_f values must lie in (0, pi]");
    }
  }
  std::sort(list.begin(), list.end(), std::greater<>());

  Config cfg = base;
  cfg.drive.type = DriveType::harmonic;
  cfg.drive.f0_rad = std::numbers::pi;
  cfg.drive.omega_d_over_omega = 1.0;
  cfg.drive.delta_f_rad = list.front();
  cfg.system.gamma_khz = o.gamma_khz;
  cfg.system.n_max = o.n_max;
  cfg.grid.steps_per_period = o.steps_per_period;
  cfg.grid.t_end_ns = o.t_max_ns;
  cfg.validate();

  ExperimentReport rep;
  rep.scenario = "fig4";
  rep.config = cfg;

  // Window probe on the strongest drive.
  EvolveOptions stop;
  const double threshold = o.n_ph_stop;
  stop.stop_when = [threshold](double, const Observables& obs) { return obs.n_ph >= threshold; };
  const SimResult probe = run_dynamics(cfg, stop);
  const double t_end_ns = probe.stopped_early
                              ? (probe.times.back() - probe.times.front()) * cfg.ns_per_time_unit()
                              : o.t_max_ns;
  cfg.grid.t_end_ns = t_end_ns;
  rep.config = cfg;
  rep.parameters["window_ns"] = t_end_ns;
  rep.parameters["window_from_threshold"] = probe.stopped_early;
  rep.parameters["delta_f_list"] = list;

  rep.rows.resize(list.size());
  parallel_for(list.size(), 0, [&](std::size_t i) {
    Config row = cfg;
    row.drive.delta_f_rad = list[i];
    rep.rows[i] = guarded_row(row, "df" + format_value(list[i]), simulate);
  });

  std::vector<double> tail_means;
  for (const auto& row : rep.rows) {
    if (!row.error.empty() || row.series.empty()) {
      tail_means.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const SimResult& r = row.series.front().result;
    const double t0 = r.times.front();
    const double t1 = r.times.back();
    tail_means.push_back(mean_over(r, r.n_ph, t0 + 0.75 * (t1 - t0), t1));
  }
  rep.parameters["final_quarter_mean_n_ph"] = tail_means;

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tail_means.size(); ++i) {
    min_gap = std::min(min_gap, tail_means[i - 1] - tail_means[i]);
  }
  if (tail_means.size() > 1) {
    rep.checks.push_back({"ordering", min_gap > 0.0, min_gap, 0.0,
                          "smallest drop of the final-quarter mean n_ph between neighbouring "
                          "delta_f values"});
  }

  const ExperimentReport& strongest = rep.rows.front();
  if (strongest.error.empty() && !strongest.series.empty()) {
    const SimResult& r = strongest.series.front().result;
    const double peak = *std::max_element(r.n_ph.begin(), r.n_ph.end());
    rep.checks.push_back({"photon_generation", peak > kFig4PhotonThreshold, peak,
                          kFig4PhotonThreshold, "largest n_ph of the strongest drive"});
    if (o.truncation_margin > 0) {
      Config wider = cfg;
      wider.system.n_max += o.truncation_margin;
      const double diff = max_n_ph_difference(r, run_dynamics(wider));
      rep.checks.push_back(upper_bound_check("truncation", diff, kTruncationTolerance));
    }
  } else {
    rep.checks.push_back({"photon_generation", false, 0.0, kFig4PhotonThreshold,
                          "strongest drive failed: " + strongest.error});
  }
  rep.wall_seconds = clock.seconds();
  return rep;
}

PerturbativeResult uniform_accel_experiment(const Config& base, double accel_m_s2,
                                            double duration_ns) {
  if (!(accel_m_s2 > 0.0)) throw InvalidArgument("uniform_accel_experiment: accel must be > 0");
  Config cfg = base;
  cfg.drive.type = DriveType::uniform_accel;
  cfg.drive.accel_m_s2 = accel_m_s2;
  cfg.drive.duration_ns = duration_ns;
  cfg.validate();
  return perturbative(cfg.system_params(), cfg.flux_profile(), cfg.perturbative_window());
}

ExperimentReport reproduce_accel(const Config& base, const AccelOptions& o) {
  Stopwatch clock;
  Config cfg = base;
  cfg.drive.type = DriveType::uniform_accel;
  cfg.drive.accel_m_s2 = o.accel_m_s2;
  cfg.drive.duration_ns = o.duration_ns;
  cfg.validate();

  ExperimentReport rep;
  rep.scenario = "accel";
  rep.config = cfg;
  const PerturbativeResult main = uniform_accel_experiment(cfg, o.accel_m_s2, o.duration_ns);
  rep.perturbative.push_back({"", main});
  rep.checks.push_back({"r_em_order", main.r_em >= kAccelRemLow && main.r_em <= kAccelRemHigh,
                        main.r_em, kAccelRemHigh, "R_em must lie in [1e-5, 1e-3]"});

  json scan = json::array();
  for (int i = 0; i < o.scan_points; ++i) {
    const double frac = o.scan_points > 1 ? static_cast<double>(i) / (o.scan_points - 1) : 1.0;
    const double accel = o.accel_m_s2 * (0.5 + 0.5 * frac);
    const PerturbativeResult r = uniform_accel_experiment(cfg, accel, o.duration_ns);
    rep.perturbative.push_back({"accel" + format_value(accel), r});
    scan.push_back({{"accel_m_s2", accel}, {"r_em", r.r_em}});
  }
  rep.parameters["accel_scan"] = scan;

  // Capability of a harmonic drive with delta_f = 0.25 at omega_d = omega.
  const double v = kGroupVelocity;
  const Kinematics kin = kinematics({0.0, 0.25, 1.0}, cfg.wavevector(), v);
  rep.parameters["harmonic_v_max_m_s"] = kin.v_max;
  rep.parameters["harmonic_a_max_m_s2"] = kin.a_max;
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport sweep(const Config& base, const std::string& axis,
                       const std::vector<double>& values, SweepMode mode, unsigned threads) {
  Stopwatch clock;
  {
    Config probe = base;
    probe.set(axis, 0.0);  // rejects unknown and non-numeric axes
  }
  ExperimentReport rep;
  rep.scenario = "sweep";
  rep.config = base;
  rep.parameters["axis"] = axis;
  rep.parameters["values"] = values;
  rep.parameters["mode"] = mode == SweepMode::simulate ? "simulate" : "perturbative";

  rep.rows.resize(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    const std::string label = axis.substr(axis.rfind('.') + 1) + format_value(values[i]);
    Config row = base;
    try {
      row.set(axis, values[i]);
    } catch (const std::exception& e) {
      rep.rows[i].scenario = "row";
      rep.rows[i].label = label;
      rep.rows[i].config = base;
      rep.rows[i].error = e.what();
      return;
    }
    rep.rows[i] = mode == SweepMode::simulate ? guarded_row(row, label, simulate)
                                              : guarded_row(row, label, perturbative_report);
  });
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport truncation_convergence(const Config& cfg, const std::vector<int>& n_max_list) {
  Stopwatch clock;
  if (n_max_list.empty()) throw InvalidArgument("truncation_convergence: empty n_max list");
  for (std::size_t i = 1; i < n_max_list.size(); ++i) {
    if (n_max_list[i] <= n_max_list[i - 1]) {
      throw InvalidArgument("truncation_convergence: n_max list must be increasing");
    }
  }
  cfg.validate();
  ExperimentReport rep;
  rep.scenario = "converge";
  rep.config = cfg;
  rep.parameters["n_max_list"] = n_max_list;

  rep.rows.resize(n_max_list.size());
  parallel_for(n_max_list.size(), 0, [&](std::size_t i) {
    Config row = cfg;
    row.system.n_max = n_max_list[i];
    rep.rows[i] = guarded_row(row, "n" + std::to_string(n_max_list[i]), simulate);
  });

  json differences = json::array();
  json recommended = nullptr;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i];
    const auto& b = rep.rows[i + 1];
    if (!a.error.empty() || !b.error.empty()) {
      differences.push_back(nullptr);
      continue;
    }
    const double d = max_n_ph_difference(a.series.front().result, b.series.front().result);
    differences.push_back(d);
    if (recommended.is_null() && d <= kTruncationTolerance) recommended = n_max_list[i];
  }
  rep.parameters["n_ph_differences"] = differences;
  rep.parameters["recommended_n_max"] = recommended;
  Check verdict{"truncation_converged", !recommended.is_null(),
                recommended.is_null() ? 0.0 : recommended.get<double>(), kTruncationTolerance,
                recommended.is_null() ? "no n_max in the list converged"
                                      : "recommended n_max"};
  rep.checks.push_back(verdict);
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport weak_coupling_consistency(const Config& base, double g0_over_omega,
                                           double r_em_limit) {
  Stopwatch clock;
  Config cfg = harmonic_config(base);
  cfg.system.g0_over_omega = g0_over_omega;
  cfg.system.gamma_khz = 0.0;
  const double lambda = anti_jc_coupling(cfg);
  // Run until R_em ~ (lambda t)^2 is past the limit.
  if (!is_decoupled(lambda, g0_over_omega)) {
    cfg.grid.t_end_ns = 1.25 * std::sqrt(r_em_limit) / lambda * cfg.ns_per_time_unit();
  }
  cfg.validate();

  ExperimentReport rep;
  rep.scenario = "weak_coupling";
  rep.config = cfg;
  SimResult r = run_dynamics(cfg);
  const SystemParams p = cfg.system_params();
  const FluxProfile fp = cfg.flux_profile();

  double worst = 0.0;
  std::size_t compared = 0;
  const double t0 = r.times.front();
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double r_em = r_emission(p, fp, {t0, r.times[i]});
    if (r_em > r_em_limit || r_em <= 0.0) continue;
    worst = std::max(worst, std::abs(r.p_e[i] - r_em) / r_em);
    ++compared;
  }
  rep.parameters["samples_compared"] = compared;
  rep.checks.push_back({"p_e_matches_r_em", compared > 0 && worst <= kPerturbativeTolerance, worst,
                        kPerturbativeTolerance, "largest |p_e - R_em| / R_em"});
  add_integrity_checks(rep.checks, r, false, "");
  rep.series.push_back(labeled("", std::move(r), cfg));
  rep.wall_seconds = clock.seconds();
  return rep;
}

}  // namespace relmotion
