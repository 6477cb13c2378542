#pragma once

// Physical parameters, flux drive profiles, simulated trajectories and the
// time-dependent Hamiltonian
//
//   H(t) = omega a^dagger a + (omega_q / 2) sigma_z + g0 cos(f(t)) sigma_x (a + a^dagger).
//
// Internal time/frequency units are dimensionless with the cavity frequency as
// the unit (omega = 1 in every canned scenario); SystemParams and HarmonicDrive
// hold values in those units. Trajectories are in SI metres with time in ns.

#include <functional>
#include <numbers>
#include <variant>

#include "relmotion/qcore.hpp"

namespace relmotion {

inline constexpr double kGroupVelocity = 1.2e8;       // m/s, coplanar line
inline constexpr double kVacuumLightSpeed = 299792458.0;  // m/s

struct SystemParams {
  double omega = 1.0;    // cavity mode
  double omega_q = 1.0;  // qubit splitting
  double g0 = 0.01;      // bare coupling
  double gamma = 0.0;    // qubit decay rate
  int n_max = 5;         // Fock truncation

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// f(t) = f0 + delta_f cos(omega_d t).
struct HarmonicDrive {
  double f0 = std::numbers::pi / 2;
  double delta_f = std::numbers::pi / 2;
  double omega_d = 2.0;
};

/// Hyperbolic (constant proper acceleration) trajectory, shifted so that
/// x(0) = x_offset. SI units except the time window, which is in ns.
struct AccelTrajectory {
  double accel = 1e15;           // m/s^2
  double c_sim = kGroupVelocity; // m/s
  double k = 1.0;                // rad/m
  double t0_ns = -0.5;
  double t1_ns = 0.5;
  double x_offset = 0.0;         // m

  void validate() const;
};

struct ConstantFlux {
  double f = 0.0;
};

/// Acceleration trajectory read through f = k x; `ns_per_time_unit` converts the
/// internal time coordinate to ns.
struct AccelFlux {
  AccelTrajectory trajectory;
  double ns_per_time_unit = 1.0;
};

/// A total function t -> f (frustration parameter, rad). The corresponding
/// external flux is f * phi_0.
class FluxProfile {
 public:
  using Variant = std::variant<ConstantFlux, HarmonicDrive, AccelFlux>;

  FluxProfile() : v_(ConstantFlux{}) {}
  FluxProfile(Variant v) : v_(std::move(v)) {}  // NOLINT: implicit by design of the variant

  static FluxProfile constant(double f) { return FluxProfile(ConstantFlux{f}); }
  static FluxProfile harmonic(const HarmonicDrive& d) { return FluxProfile(d); }
  static FluxProfile accelerated(const AccelTrajectory& tr, double ns_per_time_unit) {
    return FluxProfile(AccelFlux{tr, ns_per_time_unit});
  }

  double operator()(double t) const;

  /// Largest angular frequency present in the drive (0 for constant/accelerated).
  double drive_frequency() const;

  const Variant& variant() const noexcept { return v_; }

 private:
  Variant v_;
};

double flux_harmonic(double t, const HarmonicDrive& d);

/// x(t) = x_offset + (c/A) sqrt(c^2 + A^2 t^2) - c^2/A, t in ns, result in m.
double trajectory_uniform_accel(double t_ns, const AccelTrajectory& tr);

/// dx/dt of the hyperbolic trajectory (m/s).
double trajectory_velocity(double t_ns, const AccelTrajectory& tr);

inline double flux_from_position(double x, double k) { return k * x; }

inline double coupling_strength(double f, double g0) { return g0 * std::cos(f); }

/// Full dense H(t) on qubit (x) field.
Operator hamiltonian(double t, const SystemParams& p, const FluxProfile& fp);

/// H(t) = diag(free_diagonal) + modulation(t) * coupling. Integrators take this
/// form so that a static operator is built once per run.
struct DrivenHamiltonian {
  Eigen::VectorXd free_diagonal;
  Operator coupling;
  std::function<double(double)> modulation;

  Index dim() const noexcept { return coupling.dim(); }
  Operator at(double t) const;
};

DrivenHamiltonian driven_hamiltonian(const SystemParams& p, const FluxProfile& fp);

struct Kinematics {
  double v_max;  // m/s
  double a_max;  // m/s^2
};

/// Peak velocity and acceleration of the simulated harmonic motion
/// x(t) = (f0 + delta_f cos(omega_d t)) / k, with d.omega_d in units of the
/// cavity frequency omega = v k.
Kinematics kinematics(const HarmonicDrive& d, double k, double v);

/// Mode wave vector k = omega / v for a cavity angular frequency in rad/s.
inline double mode_wavevector(double omega_rad_per_s, double v) { return omega_rad_per_s / v; }

}  // namespace relmotion
