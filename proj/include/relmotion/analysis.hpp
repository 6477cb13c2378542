#pragma once

// Second-order perturbation theory for the emission/absorption coefficients,
// the resonant anti-Jaynes-Cummings reference model and the Fourier content of
// the modulated coupling.

#include <vector>

#include "relmotion/dynamics.hpp"
#include "relmotion/model.hpp"

namespace relmotion {

struct Window {
  double t0 = 0.0;
  double t1 = 1.0;
};

struct QuadratureOptions {
  int nodes_per_period = 40;     // of the fastest phase
  double rel_tol = 1e-8;         // on R between successive node doublings
  int max_doublings = 14;
  bool bose_factor = true;       // sqrt(2)^2 on <e,1|V|g,2> (absorption only)
};

/// Convergence record of one quadrature.
struct QuadratureReport {
  double value = 0.0;
  double previous = 0.0;  // value at half the node count
  int nodes = 0;
};

/// R_em = | int g(t) e^{-i omega_q t} e^{-i omega t} e^{-gamma (t - t0)} dt |^2.
double r_emission(const SystemParams& p, const FluxProfile& fp, Window w,
                  const QuadratureOptions& opts = {});
QuadratureReport r_emission_report(const SystemParams& p, const FluxProfile& fp, Window w,
                                   const QuadratureOptions& opts = {});

/// R_abs: same integral with field phase e^{+i omega t}, times 2 for the
/// |g,2> -> |e,1> matrix element unless opts.bose_factor is false.
double r_absorption(const SystemParams& p, const FluxProfile& fp, Window w,
                    const QuadratureOptions& opts = {});
QuadratureReport r_absorption_report(const SystemParams& p, const FluxProfile& fp, Window w,
                                     const QuadratureOptions& opts = {});

struct PerturbativeObservables {
  double sigma_z_pert;  // 1 - R_em
  double n_pert;        // R_em (1 + 2 R_abs + R_em)
};

PerturbativeObservables perturbative_observables(double r_em, double r_abs);

struct PerturbativeResult {
  double r_em = 0.0;
  double r_abs = 0.0;
  double sigma_z_pert = 1.0;
  double n_pert = 0.0;
  bool weak_coupling = true;  // g0 (t1 - t0) <= 0.3
};

PerturbativeResult perturbative(const SystemParams& p, const FluxProfile& fp, Window w,
                                const QuadratureOptions& opts = {});

/// Exact resonant anti-JC dynamics, H = g_eff (sigma_plus a^dagger + sigma_minus a),
/// in the interaction frame. gamma = 0 uses the closed 2x2 block solution;
/// gamma > 0 integrates the Lindblad equation with this static Hamiltonian.
SimResult anti_jc_evolution(double g_eff, const PureState& psi0, const TimeGrid& grid,
                            double gamma = 0.0);

struct FourierComponent {
  int harmonic_index;
  double amplitude;  // coefficient of cos(n omega_d t) in g(t)
};

/// Coefficient c_n in g0 cos(f0 + delta_f cos(omega_d t)) = sum_n c_n cos(n omega_d t),
/// projected numerically over one drive period. The resonant anti-JC coupling
/// for omega_d = omega + omega_q is c_1 / 2.
double effective_coupling(const HarmonicDrive& d, double g0, int harmonic_index);

std::vector<FourierComponent> coupling_fourier_series(const HarmonicDrive& d, double g0,
                                                      int max_index);

double resum_fourier_series(const std::vector<FourierComponent>& series, double omega_d, double t);

}  // namespace relmotion
