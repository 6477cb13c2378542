#include "relmotion/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace relmotion {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

constexpr Complex kMinusI{0.0, -1.0};
constexpr Complex kPlusI{0.0, 1.0};
constexpr double kStepCountSlack = 1e-9;

std::string step_hint(double t, double dt, const char* what, double value) {
  std::ostringstream os;
  os << what << " " << value << " at t=" << t << " with dt=" << dt
     << "; reduce the step size (raise steps_per_period)";
  return os.str();
}

void require_state_dim(Index state_dim, int n_max) {
  if (state_dim != HilbertSpace{n_max}.dim()) {
    throw DimensionError("initial state dimension " + std::to_string(state_dim) +
                         " does not match n_max=" + std::to_string(n_max));
  }
}

// Diagonals of the (diagonal) observables number, sigma_z and |e><e|.
struct DiagonalObservables {
  explicit DiagonalObservables(const HilbertSpace& space)
      : excited(space.dim()), sigma_z(space.dim()), number(space.dim()) {
    for (int q = 0; q < 2; ++q) {
      for (int n = 0; n <= space.n_max; ++n) {
        const Index i = space.index(static_cast<Qubit>(q), n);
        excited(i) = q;
        sigma_z(i) = q == 0 ? -1.0 : 1.0;
        number(i) = n;
      }
    }
  }

  Eigen::VectorXd excited;
  Eigen::VectorXd sigma_z;
  Eigen::VectorXd number;
};

Observables measure(const Eigen::VectorXd& populations, const DiagonalObservables& d,
                    double purity, double trace_dev) {
  return {populations.dot(d.excited), populations.dot(d.sigma_z), populations.dot(d.number),
          purity, trace_dev};
}

}  // namespace

TimeGrid TimeGrid::per_period(double t0, double t1, double max_frequency, int steps_per_period,
                              std::size_t record_every) {
  TimeGrid g;
  g.t0 = t0;
  g.t1 = t1;
  g.dt = 2.0 * std::numbers::pi / max_frequency / steps_per_period;
  g.record_every = record_every;
  return g;
}

std::size_t TimeGrid::steps() const {
  const double n = (t1 - t0) / dt;
  const double whole = std::floor(n);
  if (n - whole <= kStepCountSlack * std::max(1.0, n)) return static_cast<std::size_t>(whole);
  return static_cast<std::size_t>(whole) + 1;
}

double TimeGrid::time_at(std::size_t step) const {
  const std::size_t n = steps();
  const double t = t0 + static_cast<double>(std::min(step, n)) * dt;
  // A shortened final step ends exactly on t1.
  return (step >= n && t > t1) ? t1 : t;
}

bool TimeGrid::records(std::size_t step) const {
  return step % record_every == 0 || step == steps();
}

void TimeGrid::validate(double max_frequency) const {
  if (!(dt > 0.0)) throw InvalidArgument("time grid: dt must be > 0");
  if (!(t1 > t0)) throw InvalidArgument("time grid: t1 must exceed t0");
  if (record_every == 0) throw InvalidArgument("time grid: record_every must be >= 1");
  if (max_frequency > 0.0) {
    const double limit = 2.0 * std::numbers::pi / max_frequency / kMinStepsPerPeriod;
    if (dt > limit * (1.0 + 1e-12)) {
      throw InvalidArgument("time grid: dt=" + std::to_string(dt) +
                            " exceeds shortest period / 200 = " + std::to_string(limit));
    }
  }
}

double max_system_frequency(const SystemParams& p, const FluxProfile& fp) {
  return std::max({p.omega, p.omega_q, fp.drive_frequency()});
}

void SimResult::push(double t, const Observables& o) {
  times.push_back(t);
  p_e.push_back(o.p_e);
  sigma_z.push_back(o.sigma_z);
  n_ph.push_back(o.n_ph);
  purity.push_back(o.purity);
  trace_dev.push_back(o.trace_dev);
}

Observables SimResult::at(std::size_t i) const {
  return {p_e.at(i), sigma_z.at(i), n_ph.at(i), purity.at(i), trace_dev.at(i)};
}

Observables observables(const ComplexVector& psi, const HilbertSpace& space) {
  const DiagonalObservables d(space);
  const double norm2 = psi.squaredNorm();
  return measure(psi.cwiseAbs2(), d, norm2 * norm2, std::abs(norm2 - 1.0));
}

Observables observables(const ComplexMatrix& rho, const HilbertSpace& space) {
  const DiagonalObservables d(space);
  const double tr = rho.trace().real();
  return measure(rho.diagonal().real(), d, rho.squaredNorm(), std::abs(tr - 1.0));
}

Observables observables(const PureState& psi) {
  return observables(psi.amplitudes(), HilbertSpace{static_cast<int>(psi.dim() / 2 - 1)});
}

Observables observables(const DensityMatrix& rho) {
  return observables(rho.matrix(), HilbertSpace{static_cast<int>(rho.dim() / 2 - 1)});
}

SimResult evolve_schrodinger(const SystemParams& p, const FluxProfile& fp, const PureState& psi0,
                             const TimeGrid& grid, const EvolveOptions& opts) {
  p.validate();
  return evolve_schrodinger(driven_hamiltonian(p, fp), p.n_max, psi0, grid,
                            max_system_frequency(p, fp), opts);
}

SimResult evolve_schrodinger(const DrivenHamiltonian& h, int n_max, const PureState& psi0,
                             const TimeGrid& grid, double max_frequency,
                             const EvolveOptions& opts) {
  grid.validate(max_frequency);
  require_state_dim(psi0.dim(), n_max);
  const HilbertSpace space{n_max};
  const DiagonalObservables diag_obs(space);
  const SparseMatrix coupling = h.coupling.matrix().sparseView();
  const ComplexVector free = h.free_diagonal.cast<Complex>();

  ComplexVector psi = psi0.amplitudes();
  ComplexVector k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()),
      stage(psi.size());

  // The free part is diagonal and integrated exactly (Lawson RK4).
  ComplexVector half_factor(psi.size()), full_factor(psi.size());
  double factor_dt = 0.0;
  auto rhs = [&](double t, const ComplexVector& in, ComplexVector& out) {
    out.noalias() = coupling * in;
    out *= kMinusI * h.modulation(t);
  };

  SimResult result;
  auto record = [&](double t) {
    const double norm2 = psi.squaredNorm();
    const Observables o =
        measure(psi.cwiseAbs2(), diag_obs, norm2 * norm2, std::abs(norm2 - 1.0));
    result.push(t, o);
    return opts.stop_when && opts.stop_when(t, o);
  };

  const std::size_t n_steps = grid.steps();
  if (record(grid.time_at(0))) {
    result.stopped_early = true;
    return result;
  }
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double t = grid.time_at(s);
    const double dt = grid.time_at(s + 1) - t;
    if (dt != factor_dt) {
      half_factor = (kMinusI * (0.5 * dt) * free).array().exp().matrix();
      full_factor = (kMinusI * dt * free).array().exp().matrix();
      factor_dt = dt;
    }
    rhs(t, psi, k1);
    stage = half_factor.cwiseProduct(psi + (0.5 * dt) * k1);
    rhs(t + 0.5 * dt, stage, k2);
    k1 = full_factor.cwiseProduct(k1);
    psi = half_factor.cwiseProduct(psi);
    stage = psi + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, stage, k3);
    k2 = half_factor.cwiseProduct(k2 + k3);
    stage = half_factor.cwiseProduct(psi) + dt * half_factor.cwiseProduct(k3);
    psi = half_factor.cwiseProduct(psi);
    rhs(t + dt, stage, k4);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + k4);

    const double drift = std::abs(psi.norm() - 1.0);
    result.max_norm_drift = std::max(result.max_norm_drift, drift);
    if (drift > kNormDriftAbort) {
      throw NumericalError(step_hint(t + dt, dt, "norm drift", drift));
    }
    if (grid.records(s + 1) && record(grid.time_at(s + 1))) {
      result.stopped_early = s + 1 < n_steps;
      break;
    }
  }
  return result;
}

SimResult evolve_lindblad(const SystemParams& p, const FluxProfile& fp, const DensityMatrix& rho0,
                          const TimeGrid& grid, const EvolveOptions& opts) {
  p.validate();
  return evolve_lindblad(driven_hamiltonian(p, fp), p.n_max, p.gamma, rho0, grid,
                         max_system_frequency(p, fp), opts);
}

SimResult evolve_lindblad(const DrivenHamiltonian& h, int n_max, double gamma,
                          const DensityMatrix& rho0, const TimeGrid& grid, double max_frequency,
                          const EvolveOptions& opts) {
  grid.validate(max_frequency);
  require_state_dim(rho0.dim(), n_max);
  if (!(gamma >= 0.0)) throw InvalidArgument("evolve_lindblad: gamma must be >= 0");

  const HilbertSpace space{n_max};
  const DiagonalObservables diag_obs(space);
  const Index m = space.field_dim();
  const SparseMatrix coupling = h.coupling.matrix().sparseView();

  // H_eff = H - i gamma/2 |e><e|, so that
  //   d rho/dt = -i (H_eff rho - rho H_eff^dagger) + gamma L rho L^dagger.
  // The diagonal part of H_eff acts elementwise,
  //   -i (D_i - conj(D_j)) rho_ij = decay_phase_ij rho_ij,
  // and is integrated exactly (Lawson RK4); only the coupling and the jump go through
  // the Runge-Kutta stages. For Hermitian rho and coupling C, rho C = (C rho)^dagger.
  // With L = sigma_minus (x) 1 in the qubit-major basis, L rho L^dagger moves the ee
  // block onto the gg block.
  ComplexVector heff_diag = h.free_diagonal.cast<Complex>();
  heff_diag.tail(m).array() += Complex(0.0, -0.5 * gamma);

  const Index d = space.dim();
  ComplexMatrix decay_phase(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      decay_phase(i, j) = kMinusI * (heff_diag(i) - std::conj(heff_diag(j)));
    }
  }
  ComplexMatrix rho = rho0.matrix();
  ComplexMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d), work(d, d);
  ComplexMatrix half_factor(d, d), full_factor(d, d);
  double factor_dt = 0.0;

  auto rhs = [&](double t, const ComplexMatrix& in, ComplexMatrix& out) {
    work.noalias() = coupling * in;
    out.noalias() = (kMinusI * h.modulation(t)) * (work - work.adjoint());
    out.topLeftCorner(m, m) += gamma * in.bottomRightCorner(m, m);
  };

  SimResult result;
  auto record = [&](double t) {
    const double tr_dev = std::abs(rho.trace().real() - 1.0);
    const Observables o = measure(rho.diagonal().real(), diag_obs, rho.squaredNorm(), tr_dev);
    result.push(t, o);

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    result.min_eigenvalue = std::min(result.min_eigenvalue, min_eig);
    result.max_hermiticity_error = std::max(
        result.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    if (min_eig < kNegativeEigenvalueAbort) {
      throw NumericalError(step_hint(t, grid.dt, "negative eigenvalue", min_eig));
    }
    return opts.stop_when && opts.stop_when(t, o);
  };

  const std::size_t n_steps = grid.steps();
  if (record(grid.time_at(0))) {
    result.stopped_early = true;
    return result;
  }
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double t = grid.time_at(s);
    const double dt = grid.time_at(s + 1) - t;
    if (dt != factor_dt) {
      half_factor = (0.5 * dt * decay_phase).array().exp().matrix();
      full_factor = (dt * decay_phase).array().exp().matrix();
      factor_dt = dt;
    }
    rhs(t, rho, k1);
    stage = half_factor.cwiseProduct(rho + (0.5 * dt) * k1);
    rhs(t + 0.5 * dt, stage, k2);
    k1 = full_factor.cwiseProduct(k1);
    rho = half_factor.cwiseProduct(rho);
    stage = rho + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, stage, k3);
    k2 = half_factor.cwiseProduct(k2 + k3);
    stage = half_factor.cwiseProduct(rho) + dt * half_factor.cwiseProduct(k3);
    rho = half_factor.cwiseProduct(rho);
    rhs(t + dt, stage, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + k4);

    const double tr_dev = std::abs(rho.trace().real() - 1.0);
    result.max_norm_drift = std::max(result.max_norm_drift, tr_dev);
    if (tr_dev > kTraceDeviationAbort) {
      throw NumericalError(step_hint(t + dt, dt, "trace deviation", tr_dev));
    }
    if (grid.records(s + 1) && record(grid.time_at(s + 1))) {
      result.stopped_early = s + 1 < n_steps;
      break;
    }
  }
  return result;
}

namespace {

Observables reference_observables(const SystemOperators& ops, const PureState& psi) {
  const double norm2 = psi.amplitudes().squaredNorm();
  return {expectation(ops.excited, psi), expectation(ops.sigma_z, psi),
          expectation(ops.number, psi), norm2 * norm2, std::abs(norm2 - 1.0)};
}

Observables reference_observables(const SystemOperators& ops, const DensityMatrix& rho) {
  return {expectation(ops.excited, rho), expectation(ops.sigma_z, rho),
          expectation(ops.number, rho), rho.purity(), std::abs(rho.trace() - 1.0)};
}

// Column-major vectorization: vec(A X B) = (B^T (x) A) vec(X).
Operator liouvillian(const Operator& h, const Operator& c, double gamma) {
  const Index d = h.dim();
  const Operator id = Operator::identity(d);
  const Operator h_t(h.matrix().transpose());
  const Operator c_conj(c.matrix().conjugate());
  const Operator cdc = c.adjoint() * c;
  const Operator cdc_t(cdc.matrix().transpose());
  Operator l = kMinusI * (kron(id, h) - kron(h_t, id));
  l += Complex(gamma) * (kron(c_conj, c) - Complex(0.5) * kron(id, cdc) -
                         Complex(0.5) * kron(cdc_t, id));
  return l;
}

void require_substeps(int substeps) {
  if (substeps < 1) throw InvalidArgument("propagate_piecewise_exact: substeps must be >= 1");
}

}  // namespace

SimResult propagate_piecewise_exact(const SystemParams& p, const FluxProfile& fp,
                                    const PureState& psi0, const TimeGrid& grid, int substeps) {
  p.validate();
  grid.validate(max_system_frequency(p, fp));
  require_state_dim(psi0.dim(), p.n_max);
  require_substeps(substeps);
  const SystemOperators ops(p.n_max);

  ComplexVector psi = psi0.amplitudes();
  SimResult result;
  result.push(grid.time_at(0), reference_observables(ops, PureState(psi)));

  const std::size_t n_steps = grid.steps();
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double ta = grid.time_at(s);
    const double h = (grid.time_at(s + 1) - ta) / substeps;
    for (int j = 0; j < substeps; ++j) {
      const Operator ham = hamiltonian(ta + (j + 0.5) * h, p, fp);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ham.matrix());
      const ComplexVector phases =
          (kMinusI * h * es.eigenvalues().cast<Complex>()).array().exp().matrix();
      psi = es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * psi);
    }
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(psi.norm() - 1.0));
    if (grid.records(s + 1)) {
      result.push(grid.time_at(s + 1), reference_observables(ops, PureState(psi)));
    }
  }
  return result;
}

SimResult propagate_piecewise_exact(const SystemParams& p, const FluxProfile& fp,
                                    const DensityMatrix& rho0, const TimeGrid& grid,
                                    int substeps) {
  p.validate();
  grid.validate(max_system_frequency(p, fp));
  require_state_dim(rho0.dim(), p.n_max);
  require_substeps(substeps);
  const SystemOperators ops(p.n_max);
  const Index d = rho0.dim();

  ComplexMatrix rho = rho0.matrix();
  SimResult result;
  auto record = [&](double t) {
    const DensityMatrix state(rho);
    result.push(t, reference_observables(ops, state));
    result.min_eigenvalue = std::min(result.min_eigenvalue, state.min_eigenvalue());
  };
  record(grid.time_at(0));

  const std::size_t n_steps = grid.steps();
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double ta = grid.time_at(s);
    const double h = (grid.time_at(s + 1) - ta) / substeps;
    for (int j = 0; j < substeps; ++j) {
      const Operator gen = liouvillian(hamiltonian(ta + (j + 0.5) * h, p, fp), ops.lowering,
                                       p.gamma);
      const ComplexMatrix prop = (Complex(h) * gen.matrix()).exp();
      ComplexVector v = Eigen::Map<const ComplexVector>(rho.data(), d * d);
      v = prop * v;
      rho = Eigen::Map<const ComplexMatrix>(v.data(), d, d);
    }
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(rho.trace().real() - 1.0));
    if (grid.records(s + 1)) record(grid.time_at(s + 1));
  }
  return result;
}

}  // namespace relmotion
