#include "relmotion/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace relmotion {

namespace {

constexpr double kWeakCouplingLimit = 0.3;
constexpr int kProjectionNodes = 1 << 12;
// Amplitude-level floor for heavily cancelling integrals, relative to int |f| dt.
constexpr double kRoundoffFloor = 1e-14;

struct SimpsonSums {
  Complex integral;
  double magnitude;  // Simpson estimate of int |integrand| dt
};

template <class F>
SimpsonSums simpson(F&& f, double a, double b, long intervals) {
  const double h = (b - a) / static_cast<double>(intervals);
  Complex acc = 0.0;
  double mag = 0.0;
  for (long i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const Complex v = f(a + static_cast<double>(i) * h);
    acc += w * v;
    mag += w * std::abs(v);
  }
  return {acc * (h / 3.0), mag * (h / 3.0)};
}

// |int g(t) e^{-i phase t} e^{-gamma (t - t0)} dt|^2 with node doubling until
// successive estimates agree.
QuadratureReport transition_probability(const SystemParams& p, const FluxProfile& fp, Window w,
                                        double phase, const QuadratureOptions& opts) {
  p.validate();
  if (!(w.t1 > w.t0)) throw InvalidArgument("quadrature window: t1 must exceed t0");
  if (opts.nodes_per_period < 2) throw InvalidArgument("quadrature: nodes_per_period < 2");

  const double fastest = std::max({p.omega_q + p.omega, p.omega, fp.drive_frequency()});
  const double period = 2.0 * std::numbers::pi / fastest;
  long intervals = static_cast<long>(std::ceil(opts.nodes_per_period * (w.t1 - w.t0) / period));
  intervals = std::max(intervals + (intervals % 2), 2L);

  auto integrand = [&](double t) {
    const double g = coupling_strength(fp(t), p.g0);
    return g * std::exp(Complex(-p.gamma * (t - w.t0), -phase * t));
  };

  SimpsonSums prev = simpson(integrand, w.t0, w.t1, intervals);
  for (int k = 0; k < opts.max_doublings; ++k) {
    intervals *= 2;
    const SimpsonSums next = simpson(integrand, w.t0, w.t1, intervals);
    const double r_prev = std::norm(prev.integral);
    const double r_next = std::norm(next.integral);
    const bool relative_ok = std::abs(r_next - r_prev) <= opts.rel_tol * r_next;
    const bool floor_ok =
        std::abs(next.integral - prev.integral) <= kRoundoffFloor * next.magnitude;
    if (relative_ok || floor_ok) {
      return {r_next, r_prev, static_cast<int>(intervals + 1)};
    }
    prev = next;
  }
  throw NumericalError("quadrature did not converge after " +
                       std::to_string(opts.max_doublings) + " node doublings");
}

}  // namespace

QuadratureReport r_emission_report(const SystemParams& p, const FluxProfile& fp, Window w,
                                   const QuadratureOptions& opts) {
  return transition_probability(p, fp, w, p.omega_q + p.omega, opts);
}

double r_emission(const SystemParams& p, const FluxProfile& fp, Window w,
                  const QuadratureOptions& opts) {
  return r_emission_report(p, fp, w, opts).value;
}

QuadratureReport r_absorption_report(const SystemParams& p, const FluxProfile& fp, Window w,
                                     const QuadratureOptions& opts) {
  QuadratureReport r = transition_probability(p, fp, w, p.omega_q - p.omega, opts);
  if (opts.bose_factor) {
    r.value *= 2.0;
    r.previous *= 2.0;
  }
  return r;
}

double r_absorption(const SystemParams& p, const FluxProfile& fp, Window w,
                    const QuadratureOptions& opts) {
  return r_absorption_report(p, fp, w, opts).value;
}

PerturbativeObservables perturbative_observables(double r_em, double r_abs) {
  return {1.0 - r_em, r_em * (1.0 + 2.0 * r_abs + r_em)};
}

PerturbativeResult perturbative(const SystemParams& p, const FluxProfile& fp, Window w,
                                const QuadratureOptions& opts) {
  PerturbativeResult r;
  r.r_em = r_emission(p, fp, w, opts);
  r.r_abs = r_absorption(p, fp, w, opts);
  const auto obs = perturbative_observables(r.r_em, r.r_abs);
  r.sigma_z_pert = obs.sigma_z_pert;
  r.n_pert = obs.n_pert;
  r.weak_coupling = p.g0 * (w.t1 - w.t0) <= kWeakCouplingLimit;
  return r;
}

SimResult anti_jc_evolution(double g_eff, const PureState& psi0, const TimeGrid& grid,
                            double gamma) {
  const int n_max = static_cast<int>(psi0.dim() / 2) - 1;
  if (psi0.dim() % 2 != 0 || n_max < 1) {
    throw DimensionError("anti_jc_evolution: state dimension must be 2 (n_max + 1)");
  }
  const SystemOperators ops(n_max);

  if (gamma > 0.0) {
    DrivenHamiltonian h{Eigen::VectorXd::Zero(ops.space.dim()), Complex(g_eff) * ops.anti_jc,
                        [](double) { return 1.0; }};
    return evolve_lindblad(h, n_max, gamma, DensityMatrix::from_pure(psi0), grid, 0.0);
  }

  grid.validate(0.0);
  const HilbertSpace& space = ops.space;
  const ComplexVector& c0 = psi0.amplitudes();
  ComplexVector psi(c0.size());
  SimResult result;
  const std::size_t n_steps = grid.steps();
  for (std::size_t s = 0; s <= n_steps; ++s) {
    if (!grid.records(s)) continue;
    const double t = grid.time_at(s);
    psi = c0;  // |e,0> and |g,n_max> are uncoupled in the truncated space
    for (int n = 0; n < n_max; ++n) {
      const Index ig = space.index(Qubit::ground, n);
      const Index ie = space.index(Qubit::excited, n + 1);
      const double phase = g_eff * std::sqrt(static_cast<double>(n + 1)) * t;
      const Complex c = std::cos(phase);
      const Complex ms = Complex(0.0, -std::sin(phase));
      psi(ig) = c * c0(ig) + ms * c0(ie);
      psi(ie) = ms * c0(ig) + c * c0(ie);
    }
    result.push(t, observables(psi, space));
  }
  return result;
}

double effective_coupling(const HarmonicDrive& d, double g0, int harmonic_index) {
  if (harmonic_index < 0) throw InvalidArgument("effective_coupling: harmonic_index must be >= 0");
  // Periodic trapezoid over theta = omega_d t in [0, 2 pi).
  const double step = 2.0 * std::numbers::pi / kProjectionNodes;
  double acc = 0.0;
  for (int j = 0; j < kProjectionNodes; ++j) {
    const double theta = j * step;
    acc += coupling_strength(d.f0 + d.delta_f * std::cos(theta), g0) *
           std::cos(harmonic_index * theta);
  }
  const double weight = harmonic_index == 0 ? 1.0 : 2.0;
  return weight * acc / kProjectionNodes;
}

std::vector<FourierComponent> coupling_fourier_series(const HarmonicDrive& d, double g0,
                                                      int max_index) {
  std::vector<FourierComponent> out;
  out.reserve(static_cast<std::size_t>(std::max(max_index + 1, 0)));
  for (int n = 0; n <= max_index; ++n) out.push_back({n, effective_coupling(d, g0, n)});
  return out;
}

double resum_fourier_series(const std::vector<FourierComponent>& series, double omega_d,
                            double t) {
  double acc = 0.0;
  for (const auto& c : series) acc += c.amplitude * std::cos(c.harmonic_index * omega_d * t);
  return acc;
}

}  // namespace relmotion
