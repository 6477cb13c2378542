#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relmotion/dynamics.hpp"

using namespace relmotion;
using std::numbers::pi;

namespace {

double max_observable_difference(const SimResult& a, const SimResult& b) {
  REQUIRE(a.size() == b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.times[i] == b.times[i]);
    d = std::max({d, std::abs(a.p_e[i] - b.p_e[i]), std::abs(a.n_ph[i] - b.n_ph[i]),
                  std::abs(a.sigma_z[i] - b.sigma_z[i])});
  }
  return d;
}

const HarmonicDrive kFig3Drive{pi / 2, pi / 2, 2.0};

}  // namespace

TEST_CASE("time grid bookkeeping") {
  TimeGrid g{0.0, 1.0, 0.1, 3};
  CHECK(g.steps() == 10);
  CHECK(g.time_at(10) == doctest::Approx(1.0));
  CHECK(g.records(0));
  CHECK(g.records(3));
  CHECK_FALSE(g.records(4));
  CHECK(g.records(10));

  TimeGrid ragged{0.0, 1.05, 0.1, 1};
  CHECK(ragged.steps() == 11);
  CHECK(ragged.time_at(11) == 1.05);

  const TimeGrid pp = TimeGrid::per_period(0.0, 10.0, 2.0, 200);
  CHECK(pp.dt == doctest::Approx(pi / 200));
  CHECK_NOTHROW(pp.validate(2.0));
  CHECK_THROWS_AS(pp.validate(2.5), InvalidArgument);
  CHECK_THROWS_AS((TimeGrid{1.0, 0.0, 0.1, 1}.validate(0.0)), InvalidArgument);
  CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 0.1, 0}.validate(0.0)), InvalidArgument);
}

TEST_CASE("decoupled drive leaves the vacuum untouched") {
  const SystemParams p{1.0, 1.0, 0.01, 0.0, 3};
  const FluxProfile fp = FluxProfile::harmonic({pi / 2, 0.0, 2.0});
  const TimeGrid g = TimeGrid::per_period(0.0, 50.0, 2.0, 200, 20);
  const SimResult r = evolve_schrodinger(p, fp, PureState::basis(Qubit::ground, 0, 3), g);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r.p_e[i] < 1e-30);
    CHECK(r.n_ph[i] < 1e-30);
    CHECK(r.sigma_z[i] == doctest::Approx(-1.0));
  }
}

TEST_CASE("unitary evolution preserves the norm (property)") {
  for (int n_max : {2, 5, 8}) {
    const SystemParams p{1.0, 1.0, 0.05, 0.0, n_max};
    const TimeGrid g = TimeGrid::per_period(0.0, 20 * pi, 2.0, 200, 10);
    const SimResult r = evolve_schrodinger(p, FluxProfile::harmonic(kFig3Drive),
                                           PureState::basis(Qubit::excited, 1, n_max), g);
    CHECK(r.max_norm_drift <= 1e-8);
    for (double tr : r.trace_dev) CHECK(tr <= 1e-8);
  }
}

TEST_CASE("RK4 matches the piecewise-exact propagator (unitary)") {
  const SystemParams p{1.0, 1.0, 0.01, 0.0, 3};
  const FluxProfile fp = FluxProfile::harmonic(kFig3Drive);
  const TimeGrid g = TimeGrid::per_period(0.0, 20 * 2 * pi, 2.0, 200, 10);
  const PureState psi0 = PureState::basis(Qubit::ground, 0, 3);
  const SimResult rk = evolve_schrodinger(p, fp, psi0, g);
  const SimResult exact = propagate_piecewise_exact(p, fp, psi0, g, 16);
  CHECK(max_observable_difference(rk, exact) <= 1e-6);
}

TEST_CASE("RK4 matches the piecewise-exact propagator (Lindblad)") {
  const SystemParams p{1.0, 1.0, 0.02, 0.01, 2};
  const FluxProfile fp = FluxProfile::harmonic(kFig3Drive);
  const TimeGrid g = TimeGrid::per_period(0.0, 10 * 2 * pi, 2.0, 200, 10);
  const DensityMatrix rho0 = DensityMatrix::from_pure(PureState::basis(Qubit::excited, 0, 2));
  const SimResult rk = evolve_lindblad(p, fp, rho0, g);
  const SimResult exact = propagate_piecewise_exact(p, fp, rho0, g, 16);
  CHECK(max_observable_difference(rk, exact) <= 1e-6);
}

TEST_CASE("Lindblad with gamma = 0 reproduces the Schrodinger run") {
  const SystemParams p{1.0, 1.0, 0.03, 0.0, 4};
  const FluxProfile fp = FluxProfile::harmonic({0.3, 1.0, 1.0});
  const TimeGrid g = TimeGrid::per_period(0.0, 30.0, 1.0, 200, 10);
  const PureState psi0 = PureState::basis(Qubit::ground, 0, 4);
  const SimResult a = evolve_schrodinger(p, fp, psi0, g);
  const SimResult b = evolve_lindblad(p, fp, DensityMatrix::from_pure(psi0), g);
  // two different fourth-order discretizations of the same flow
  CHECK(max_observable_difference(a, b) <= 1e-7);
  for (double pur : b.purity) CHECK(std::abs(pur - 1.0) <= 1e-7);
}

TEST_CASE("free qubit decay is exponential") {
  const double gamma = 0.02;
  const SystemParams p{1.0, 1.0, 0.01, gamma, 2};
  const FluxProfile off = FluxProfile::constant(pi / 2);
  const TimeGrid g = TimeGrid::per_period(0.0, 100.0, 1.0, 200, 50);
  const SimResult r =
      evolve_lindblad(p, off, DensityMatrix::from_pure(PureState::basis(Qubit::excited, 0, 2)), g);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r.p_e[i] == doctest::Approx(std::exp(-gamma * r.times[i])).epsilon(1e-9));
    CHECK(r.trace_dev[i] <= 1e-12);
  }
  CHECK(r.min_eigenvalue >= -1e-12);
}

TEST_CASE("Lindblad keeps trace and positivity (property)") {
  for (double gamma : {1e-4, 1e-2}) {
    const SystemParams p{1.0, 1.0, 0.05, gamma, 4};
    const TimeGrid g = TimeGrid::per_period(0.0, 40 * pi, 2.0, 200, 20);
    const SimResult r =
        evolve_lindblad(p, FluxProfile::harmonic(kFig3Drive),
                        DensityMatrix::from_pure(PureState::basis(Qubit::ground, 0, 4)), g);
    CHECK(r.max_norm_drift <= 1e-7);
    CHECK(r.min_eigenvalue >= -1e-8);
    CHECK(r.max_hermiticity_error <= 1e-12);
    for (double pur : r.purity) CHECK(pur <= 1.0 + 1e-12);
  }
}

TEST_CASE("halving the step changes observables by less than 1e-7") {
  const SystemParams p{1.0, 1.0, 0.01, 0.0, 5};
  const FluxProfile fp = FluxProfile::harmonic(kFig3Drive);
  const PureState psi0 = PureState::basis(Qubit::ground, 0, 5);
  const SimResult coarse = evolve_schrodinger(p, fp, psi0, TimeGrid::per_period(0.0, 20 * 2 * pi, 2.0, 200, 10));
  const SimResult fine = evolve_schrodinger(p, fp, psi0, TimeGrid::per_period(0.0, 20 * 2 * pi, 2.0, 400, 20));
  CHECK(max_observable_difference(coarse, fine) <= 1e-7);
}

TEST_CASE("stop_when ends the run at a recorded sample") {
  const SystemParams p{1.0, 1.0, 0.05, 0.0, 3};
  const TimeGrid g = TimeGrid::per_period(0.0, 400.0, 2.0, 200, 10);
  EvolveOptions opts;
  opts.stop_when = [](double, const Observables& o) { return o.p_e > 0.1; };
  const SimResult r = evolve_schrodinger(p, FluxProfile::harmonic(kFig3Drive),
                                         PureState::basis(Qubit::ground, 0, 3), g, opts);
  CHECK(r.stopped_early);
  CHECK(r.p_e.back() > 0.1);
  CHECK(r.p_e[r.size() - 2] <= 0.1);
  CHECK(r.times.back() < 400.0);
}

TEST_CASE("integrator aborts when it leaves its accuracy envelope") {
  const int n_max = 2;
  const SystemOperators ops(n_max);
  DrivenHamiltonian h{Eigen::VectorXd::Constant(ops.space.dim(), 0.0), Complex(50.0) * ops.interaction,
                      [](double) { return 1.0; }};
  const TimeGrid g{0.0, 10.0, 0.1, 1};
  CHECK_THROWS_AS(evolve_schrodinger(h, n_max, PureState::basis(Qubit::ground, 0, n_max), g, 0.0),
                  NumericalError);
  CHECK_THROWS_AS(
      evolve_lindblad(h, n_max, 0.1, DensityMatrix::from_pure(PureState::basis(Qubit::ground, 0, n_max)), g, 0.0),
      NumericalError);
}

TEST_CASE("state dimension must match the truncation") {
  const SystemParams p{1.0, 1.0, 0.01, 0.0, 3};
  const TimeGrid g = TimeGrid::per_period(0.0, 1.0, 2.0, 200);
  CHECK_THROWS_AS(evolve_schrodinger(p, FluxProfile::harmonic(kFig3Drive),
                                     PureState::basis(Qubit::ground, 0, 4), g),
                  DimensionError);
}

TEST_CASE("coarse grids are rejected") {
  const SystemParams p{1.0, 1.0, 0.01, 0.0, 3};
  const TimeGrid g{0.0, 10.0, 0.1, 1};
  CHECK_THROWS_AS(evolve_schrodinger(p, FluxProfile::harmonic(kFig3Drive),
                                     PureState::basis(Qubit::ground, 0, 3), g),
                  InvalidArgument);
}
