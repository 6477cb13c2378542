#include "relmotion/model.hpp"

#include <cmath>
#include <limits>

namespace relmotion {

namespace {

constexpr double kMaxCouplingRatio = 0.2;
constexpr double kSecondsPerNs = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void SystemParams::validate() const {
  if (!(omega > 0.0)) throw ValidationError("omega", "must be > 0");
  if (!(omega_q > 0.0)) throw ValidationError("omega_q", "must be > 0");
  if (!(gamma >= 0.0)) throw ValidationError("gamma", "must be >= 0");
  if (!(g0 >= 0.0)) throw ValidationError("g0", "must be >= 0");
  if (g0 > kMaxCouplingRatio * omega) {
    throw ValidationError("g0", "exceeds 0.2 * omega (deep-ultrastrong regime not supported)");
  }
  if (n_max < 1) throw ValidationError("n_max", "must be >= 1");
}

void AccelTrajectory::validate() const {
  if (!(accel > 0.0)) throw ValidationError("accel", "must be > 0");
  if (!(c_sim > 0.0)) throw ValidationError("c_sim", "must be > 0");
  if (!(k > 0.0)) throw ValidationError("k", "must be > 0");
  if (!(t1_ns > t0_ns)) throw ValidationError("t_span", "t1 must exceed t0");
}

double flux_harmonic(double t, const HarmonicDrive& d) {
  return d.f0 + d.delta_f * std::cos(d.omega_d * t);
}

double trajectory_uniform_accel(double t_ns, const AccelTrajectory& tr) {
  // (c/A)(sqrt(c^2 + A^2 t^2) - c) rewritten without cancellation.
  const double t = t_ns * kSecondsPerNs;
  const double c = tr.c_sim;
  const double at = tr.accel * t;
  const double root = std::sqrt(c * c + at * at);
  return tr.x_offset + c * tr.accel * t * t / (root + c);
}

double trajectory_velocity(double t_ns, const AccelTrajectory& tr) {
  const double t = t_ns * kSecondsPerNs;
  const double c = tr.c_sim;
  const double at = tr.accel * t;
  return c * at / std::sqrt(c * c + at * at);
}

double FluxProfile::operator()(double t) const {
  return std::visit(
      overloaded{
          [](const ConstantFlux& c) { return c.f; },
          [t](const HarmonicDrive& d) { return flux_harmonic(t, d); },
          [t](const AccelFlux& a) {
            const double x = trajectory_uniform_accel(t * a.ns_per_time_unit, a.trajectory);
            return flux_from_position(x, a.trajectory.k);
          },
      },
      v_);
}

double FluxProfile::drive_frequency() const {
  if (const auto* d = std::get_if<HarmonicDrive>(&v_)) return d->omega_d;
  return 0.0;
}

Operator hamiltonian(double t, const SystemParams& p, const FluxProfile& fp) {
  const SystemOperators ops(p.n_max);
  const double g = coupling_strength(fp(t), p.g0);
  return Complex(p.omega) * ops.number + Complex(p.omega_q / 2.0) * ops.sigma_z +
         Complex(g) * ops.interaction;
}

Operator DrivenHamiltonian::at(double t) const {
  Operator h = Complex(modulation(t)) * coupling;
  ComplexMatrix m = h.matrix();
  m.diagonal() += free_diagonal.cast<Complex>();
  return Operator(std::move(m));
}

DrivenHamiltonian driven_hamiltonian(const SystemParams& p, const FluxProfile& fp) {
  const HilbertSpace space{p.n_max};
  Eigen::VectorXd diag(space.dim());
  for (int q = 0; q < 2; ++q) {
    const double qubit_energy = (q == 0 ? -0.5 : 0.5) * p.omega_q;
    for (int n = 0; n <= p.n_max; ++n) {
      diag(space.index(static_cast<Qubit>(q), n)) = p.omega * n + qubit_energy;
    }
  }
  const SystemOperators ops(p.n_max);
  const double g0 = p.g0;
  return {std::move(diag), ops.interaction,
          [fp, g0](double t) { return coupling_strength(fp(t), g0); }};
}

Kinematics kinematics(const HarmonicDrive& d, double k, double v) {
  // omega_d (physical) = d.omega_d * v * k and amplitude dx = delta_f / k, so
  // v_max = dx * omega_d = delta_f * d.omega_d * v with k cancelling.
  const double v_max = d.delta_f * d.omega_d * v;
  return {v_max, v_max * d.omega_d * v * k};
}

}  // namespace relmotion
