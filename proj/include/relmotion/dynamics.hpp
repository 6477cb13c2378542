#pragma once

// Time evolution of the driven qubit-cavity system in the lab frame.
//
// evolve_schrodinger / evolve_lindblad use fixed-step integrating-factor RK4
// (Lawson): the diagonal part of H (H_eff) is applied exactly, the coupling,
// evaluated at the stage times, and the jump term go through RK4 stages. propagate_piecewise_exact freezes H at
// each step midpoint and applies the exact (super)operator exponential; it is
// slow and exists as an independent reference for both integrators.

#include <cstddef>
#include <functional>
#include <vector>

#include "relmotion/model.hpp"
#include "relmotion/qcore.hpp"

namespace relmotion {

/// Fixed-step grid on [t0, t1]. The final step is shortened when (t1 - t0) is
/// not a whole number of steps. Observables are recorded at step 0, every
/// `record_every` steps and at t1.
struct TimeGrid {
  static constexpr int kMinStepsPerPeriod = 200;

  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-2;
  std::size_t record_every = 1;

  /// dt = (2 pi / max_frequency) / steps_per_period.
  static TimeGrid per_period(double t0, double t1, double max_frequency, int steps_per_period,
                             std::size_t record_every = 1);

  std::size_t steps() const;
  double time_at(std::size_t step) const;
  bool records(std::size_t step) const;

  /// Requires dt > 0, t1 > t0 and dt <= (2 pi / max_frequency) / 200.
  void validate(double max_frequency) const;
};

/// Largest of omega, omega_q and the drive frequency.
double max_system_frequency(const SystemParams& p, const FluxProfile& fp);

struct Observables {
  double p_e = 0.0;
  double sigma_z = 0.0;
  double n_ph = 0.0;
  double purity = 0.0;
  double trace_dev = 0.0;
};

struct SimResult {
  std::vector<double> times;
  std::vector<double> p_e;
  std::vector<double> sigma_z;
  std::vector<double> n_ph;
  std::vector<double> purity;
  std::vector<double> trace_dev;

  // Run-wide diagnostics.
  double max_norm_drift = 0.0;       // | ||psi|| - 1 | (unitary) or |Tr rho - 1|
  double min_eigenvalue = 1.0;       // smallest eigenvalue of rho over samples
  double max_hermiticity_error = 0.0;
  bool stopped_early = false;

  std::size_t size() const noexcept { return times.size(); }
  void push(double t, const Observables& o);
  Observables at(std::size_t i) const;
};

struct EvolveOptions {
  /// Evaluated after each recorded sample; returning true ends the run there.
  std::function<bool(double, const Observables&)> stop_when;
};

/// Observables of a (possibly slightly unnormalized) state vector.
Observables observables(const ComplexVector& psi, const HilbertSpace& space);
/// Observables of a density matrix.
Observables observables(const ComplexMatrix& rho, const HilbertSpace& space);

Observables observables(const PureState& psi);
Observables observables(const DensityMatrix& rho);

inline constexpr double kNormDriftAbort = 1e-6;
inline constexpr double kTraceDeviationAbort = 1e-6;
inline constexpr double kNegativeEigenvalueAbort = -1e-6;

SimResult evolve_schrodinger(const SystemParams& p, const FluxProfile& fp, const PureState& psi0,
                             const TimeGrid& grid, const EvolveOptions& opts = {});

/// Generic form; the grid is validated against `max_frequency`.
SimResult evolve_schrodinger(const DrivenHamiltonian& h, int n_max, const PureState& psi0,
                             const TimeGrid& grid, double max_frequency,
                             const EvolveOptions& opts = {});

/// Lindblad evolution with qubit decay sigma_minus (x) 1 at rate p.gamma.
SimResult evolve_lindblad(const SystemParams& p, const FluxProfile& fp, const DensityMatrix& rho0,
                          const TimeGrid& grid, const EvolveOptions& opts = {});

SimResult evolve_lindblad(const DrivenHamiltonian& h, int n_max, double gamma,
                          const DensityMatrix& rho0, const TimeGrid& grid, double max_frequency,
                          const EvolveOptions& opts = {});

/// Reference propagators. Each grid step is split into `substeps` equal
/// pieces, with H frozen at each piece's midpoint.
SimResult propagate_piecewise_exact(const SystemParams& p, const FluxProfile& fp,
                                    const PureState& psi0, const TimeGrid& grid,
                                    int substeps = 1);
SimResult propagate_piecewise_exact(const SystemParams& p, const FluxProfile& fp,
                                    const DensityMatrix& rho0, const TimeGrid& grid,
                                    int substeps = 1);

}  // namespace relmotion
