// Acceptance suite. `acceptance` runs every criterion, `acceptance <n>` one of
// them. Each criterion prints a single PASS/FAIL line; the exit code is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/bessel_series.hpp"
#include "relmotion/harness.hpp"
#include "relmotion/relmotion.h"

using namespace relmotion;
using std::numbers::pi;

namespace {

// Tolerances and runtime limits.
constexpr double kAccelRemLow = 1e-5;
constexpr double kAccelRemHigh = 1e-3;
constexpr double kAccelSeconds = 1.0;
constexpr double kFig3UnitarySeconds = 30.0;
constexpr double kFig3DissipativeSeconds = 300.0;
constexpr double kFig4Seconds = 600.0;
constexpr double kWeakCouplingSeconds = 60.0;
constexpr double kIntegritySeconds = 120.0;
constexpr double kKinematicsSeconds = 1.0;
constexpr double kNormDrift = 1e-8;
constexpr double kTraceDeviation = 1e-7;
constexpr double kMinEigenvalue = -1e-8;
constexpr double kOracle = 1e-6;
constexpr double kStepHalving = 1e-7;
constexpr double kResummation = 1e-6;
constexpr double kBesselOracle = 1e-9;
constexpr double kKinematicTolerance = 0.01;
constexpr double kPaperAcceleration = 7.5e17;

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string describe_checks(const ExperimentReport& r, const std::string& prefix) {
  std::string out;
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    out += " " + c.name + "=" + fmt("%.4g", c.value) + (c.passed ? "" : "(FAIL)");
  }
  return out;
}

bool checks_pass(const ExperimentReport& r, const std::string& prefix) {
  bool any = false;
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    any = true;
    if (!c.passed) return false;
  }
  return any && r.error.empty();
}

double max_difference(const SimResult& a, const SimResult& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.times[i] != b.times[i]) return INFINITY;
    d = std::max({d, std::abs(a.p_e[i] - b.p_e[i]), std::abs(a.n_ph[i] - b.n_ph[i]),
                  std::abs(a.sigma_z[i] - b.sigma_z[i]), std::abs(a.purity[i] - b.purity[i])});
  }
  return d;
}

Outcome uniform_acceleration() {
  Stopwatch clock;
  const PerturbativeResult r = uniform_accel_experiment(Config{}, 1e15, 1.0);
  const double secs = clock.seconds();
  const bool ok = r.r_em >= kAccelRemLow && r.r_em <= kAccelRemHigh && secs < kAccelSeconds;
  return {ok, "R_em=" + fmt("%.3e", r.r_em) + " (required [1e-5, 1e-3]), R_abs=" +
                  fmt("%.3e", r.r_abs) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome anti_jc_unitary() {
  Stopwatch clock;
  Fig3Options o;
  o.dissipative = false;
  const ExperimentReport r = reproduce_fig3(Config{}, o);
  const double secs = clock.seconds();
  const bool ok = checks_pass(r, "unitary.") && secs < kFig3UnitarySeconds;
  return {ok, describe_checks(r, "unitary.") + ", " + fmt("%.1f", secs) + " s"};
}

Outcome dissipative_growth() {
  Stopwatch clock;
  Fig3Options o;
  o.unitary = false;
  const ExperimentReport r = reproduce_fig3(Config{}, o);
  const double secs = clock.seconds();
  const bool ok = checks_pass(r, "dissipative.") && secs < kFig3DissipativeSeconds;
  return {ok, describe_checks(r, "dissipative.") + ", " + fmt("%.1f", secs) + " s"};
}

Outcome parametric_ordering() {
  Stopwatch clock;
  const ExperimentReport r = reproduce_fig4(Config{}, Fig4Options{});
  const double secs = clock.seconds();
  std::string detail = describe_checks(r, "");
  detail += ", window " + fmt("%.2f", r.parameters.value("window_ns", 0.0)) + " ns, tail means";
  for (const auto& m : r.parameters["final_quarter_mean_n_ph"]) {
    detail += " " + (m.is_null() ? std::string("nan") : fmt("%.3f", m.get<double>()));
  }
  const bool ok = r.all_passed() && r.find_check("ordering") && r.find_check("photon_generation") &&
                  secs < kFig4Seconds;
  return {ok, detail + ", " + fmt("%.1f", secs) + " s"};
}

Outcome perturbative_consistency() {
  Stopwatch clock;
  const ExperimentReport r = weak_coupling_consistency(Config{}, 1e-3, 1e-3);
  const double secs = clock.seconds();
  const bool ok = r.all_passed() && secs < kWeakCouplingSeconds;
  return {ok, describe_checks(r, "") + ", " +
                  std::to_string(r.parameters.value("samples_compared", 0)) + " samples, " +
                  fmt("%.1f", secs) + " s"};
}

Outcome numerical_integrity() {
  Stopwatch clock;
  std::vector<std::pair<std::string, bool>> parts;
  std::string detail;
  auto record = [&](const std::string& name, double value, bool ok) {
    parts.emplace_back(name, ok);
    detail += " " + name + "=" + fmt("%.2e", value) + (ok ? "" : "(FAIL)");
  };

  const Config base;
  const SystemParams fig3 = base.system_params();
  const HarmonicDrive drive{pi / 2, pi / 2, 2.0};
  const FluxProfile fp = FluxProfile::harmonic(drive);
  const double lambda = std::abs(effective_coupling(drive, fig3.g0, 1)) / 2.0;
  const double rabi = pi / lambda;

  {  // unitary norm over three Rabi periods at n_max = 5
    SystemParams p = fig3;
    p.n_max = 5;
    const SimResult r = evolve_schrodinger(p, fp, PureState::basis(Qubit::ground, 0, 5),
                                           TimeGrid::per_period(0.0, 3 * rabi, 2.0, 400, 10));
    record("norm_drift", r.max_norm_drift, r.max_norm_drift <= kNormDrift);
  }
  {  // Lindblad trace and positivity, dissipative scenario over four Rabi periods
    SystemParams p = fig3;
    p.n_max = 10;
    p.gamma = 400.0 * 1e-6 / 4.0;
    const SimResult r = evolve_lindblad(
        p, fp, DensityMatrix::from_pure(PureState::basis(Qubit::ground, 0, 10)),
        TimeGrid::per_period(0.0, 4 * rabi, 2.0, 200, 10));
    record("trace_deviation", r.max_norm_drift, r.max_norm_drift <= kTraceDeviation);
    record("min_eigenvalue", r.min_eigenvalue, r.min_eigenvalue >= kMinEigenvalue);
  }
  {  // RK4 against the piecewise-exact propagators
    SystemParams p = fig3;
    p.n_max = 5;
    const TimeGrid g = TimeGrid::per_period(0.0, 20 * 2 * pi, 2.0, 200, 10);
    const PureState psi0 = PureState::basis(Qubit::ground, 0, 5);
    const double du = max_difference(evolve_schrodinger(p, fp, psi0, g),
                                     propagate_piecewise_exact(p, fp, psi0, g, 16));
    record("oracle_unitary", du, du <= kOracle);

    SystemParams q = fig3;
    q.n_max = 2;
    q.gamma = 0.01;
    const TimeGrid gl = TimeGrid::per_period(0.0, 10 * 2 * pi, 2.0, 200, 10);
    const DensityMatrix rho0 = DensityMatrix::from_pure(PureState::basis(Qubit::ground, 0, 2));
    const double dl = max_difference(evolve_lindblad(q, fp, rho0, gl),
                                     propagate_piecewise_exact(q, fp, rho0, gl, 16));
    record("oracle_lindblad", dl, dl <= kOracle);
  }
  {  // step halving on one Rabi period at n_max = 5
    SystemParams p = fig3;
    p.n_max = 5;
    const PureState psi0 = PureState::basis(Qubit::ground, 0, 5);
    const SimResult coarse =
        evolve_schrodinger(p, fp, psi0, TimeGrid::per_period(0.0, rabi, 2.0, 200, 10));
    const SimResult fine =
        evolve_schrodinger(p, fp, psi0, TimeGrid::per_period(0.0, rabi, 2.0, 400, 20));
    const double d = max_difference(coarse, fine);
    record("step_halving", d, d <= kStepHalving);
  }
  {  // Fourier content of g(t)
    const auto series = coupling_fourier_series(drive, fig3.g0, 30);
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = i * 0.01 * pi;
      err = std::max(err, std::abs(resum_fourier_series(series, drive.omega_d, t) -
                                   coupling_strength(flux_harmonic(t, drive), fig3.g0)));
    }
    record("fourier_resummation", err, err <= kResummation);
    // The projection returns c1 = -2 g0 J1(pi/2); the magnitude is compared.
    const double c1 = effective_coupling(drive, fig3.g0, 1);
    const double diff = std::abs(std::abs(c1) - 2 * fig3.g0 * oracle::bessel_j(1, pi / 2));
    record("c1_vs_bessel", diff, diff <= kBesselOracle);
  }
  const double secs = clock.seconds();
  bool ok = secs < kIntegritySeconds;
  for (const auto& [name, passed] : parts) ok = ok && passed;
  return {ok, detail + ", " + fmt("%.1f", secs) + " s"};
}

Outcome kinematic_capability() {
  Stopwatch clock;
  const Config base;
  const double v = kGroupVelocity;
  const double k = base.wavevector();
  const Kinematics kin = kinematics({0.0, 0.25, 1.0}, k, v);
  const double omega = v * k;
  const double closed = 0.25 * omega * omega / k;
  const double rel_closed = std::abs(kin.a_max - closed) / closed;
  const double rel_paper = std::abs(kin.a_max - kPaperAcceleration) / kPaperAcceleration;
  const double secs = clock.seconds();
  const bool ok = kin.v_max == v / 4 && rel_closed <= kKinematicTolerance &&
                  rel_paper <= kKinematicTolerance && secs < kKinematicsSeconds;
  return {ok, "v_max/v=" + fmt("%.17g", kin.v_max / v) + " a_max=" + fmt("%.4e", kin.a_max) +
                  " (closed form " + fmt("%.4e", closed) + ", 7.5e17 off by " +
                  fmt("%.2f%%", 100 * rel_paper) + ")"};
}

std::string run_csv(const char* json_config, const std::filesystem::path& csv) {
  rm_config* cfg = nullptr;
  if (rm_config_parse(json_config, &cfg) != RM_OK) return "config error: " + std::string(rm_last_error());
  rm_report* rep = nullptr;
  const rm_status s = rm_simulate(cfg, &rep);
  rm_config_free(cfg);
  if (s != RM_OK && s != RM_VERDICT_FAIL) return "run error: " + std::string(rm_last_error());
  const rm_status w = rm_report_write(rep, csv.c_str(), nullptr);
  rm_report_free(rep);
  if (w != RM_OK) return "write error: " + std::string(rm_last_error());
  std::ifstream in(csv, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "relmotion_acceptance";
  std::filesystem::create_directories(dir);
  const char* scenarios[] = {
      R"({"system": {"n_max": 5}, "grid": {"t_end_ns": 5, "steps_per_period": 400}})",
      R"({"system": {"n_max": 6, "gamma_khz": 400},
          "drive": {"f0_rad": 3.141592653589793, "delta_f_rad": 3.141592653589793,
                    "omega_d_over_omega": 1},
          "grid": {"t_end_ns": 5}})",
  };
  bool ok = true;
  std::string detail;
  int i = 0;
  for (const char* s : scenarios) {
    const std::string a = run_csv(s, dir / ("a" + std::to_string(i) + ".csv"));
    const std::string b = run_csv(s, dir / ("b" + std::to_string(i) + ".csv"));
    const bool same = a == b && a.rfind("t_ns,", 0) == 0;
    ok = ok && same;
    detail += " scenario" + std::to_string(i) + (same ? " identical" : " DIFFERENT") + " (" +
              std::to_string(a.size()) + " bytes)";
    ++i;
  }
  // sweep rows must not depend on the worker count
  Config base;
  base.system.n_max = 4;
  base.grid.t_end_ns = 3.0;
  const ExperimentReport one = sweep(base, "drive.delta_f_rad", {0.5, 1.0, 1.5}, SweepMode::simulate, 1);
  const ExperimentReport many = sweep(base, "drive.delta_f_rad", {0.5, 1.0, 1.5}, SweepMode::simulate, 3);
  bool rows_same = one.rows.size() == many.rows.size();
  for (std::size_t r = 0; rows_same && r < one.rows.size(); ++r) {
    rows_same = max_difference(one.rows[r].series.front().result,
                               many.rows[r].series.front().result) == 0.0;
  }
  ok = ok && rows_same;
  detail += rows_same ? ", sweep rows identical across worker counts" : ", sweep rows DIFFER";
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "uniform-acceleration emission", uniform_acceleration},
      {2, "anti-JC correspondence (unitary)", anti_jc_unitary},
      {3, "dissipation-induced photon growth", dissipative_growth},
      {4, "parametric generation ordering", parametric_ordering},
      {5, "perturbation-theory consistency", perturbative_consistency},
      {6, "numerical integrity", numerical_integrity},
      {7, "kinematic capability", kinematic_capability},
      {8, "determinism", determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string(" error: ") + e.what()};
    }
    std::printf("[%s] %d %s:%s%s\n", o.passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.empty() || o.detail[0] == ' ' ? "" : " ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  return failures;
}
