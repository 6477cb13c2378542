#include "relmotion/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace relmotion {

namespace {

constexpr double kObservableHermiticity = 1e-10;
constexpr double kImaginaryResidue = 1e-9;

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(a) +
                         " does not match " + std::to_string(b));
  }
}

double checked_real(Complex value) {
  if (std::abs(value.imag()) > kImaginaryResidue) {
    throw NumericalError("expectation value has imaginary part " +
                         std::to_string(value.imag()));
  }
  return value.real();
}

void require_observable(const Operator& a) {
  if (!a.is_hermitian(kObservableHermiticity)) {
    throw InvalidArgument("expectation requires a Hermitian operator (error " +
                          std::to_string(a.hermiticity_error()) + ")");
  }
}

}  // namespace

Operator::Operator(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw DimensionError("operator must be square, got " + std::to_string(m_.rows()) +
                         "x" + std::to_string(m_.cols()));
  }
}

Operator Operator::zero(Index dim) { return Operator(ComplexMatrix::Zero(dim, dim)); }

Operator Operator::identity(Index dim) {
  return Operator(ComplexMatrix::Identity(dim, dim));
}

double Operator::hermiticity_error() const {
  if (m_.size() == 0) return 0.0;
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_dim(dim(), rhs.dim(), "operator +");
  m_ += rhs.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_dim(dim(), rhs.dim(), "operator -");
  m_ -= rhs.m_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_dim(lhs.dim(), rhs.dim(), "operator *");
  return Operator(lhs.m_ * rhs.m_);
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_abs_difference(const Operator& a, const Operator& b) {
  require_same_dim(a.dim(), b.dim(), "max_abs_difference");
  if (a.dim() == 0) return 0.0;
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

LadderOps ladder_ops(int n_max) {
  if (n_max < 1) {
    throw InvalidArgument("ladder_ops: n_max must be >= 1 to represent photon creation");
  }
  const Index dim = n_max + 1;
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  Operator annihilation(a);
  Operator creation = annihilation.adjoint();
  return {std::move(annihilation), std::move(creation)};
}

QubitOps qubit_ops() {
  // Row/column 0 is |g>, 1 is |e>.
  ComplexMatrix sx(2, 2), sz(2, 2), sm(2, 2), sp(2, 2);
  sx << 0, 1, 1, 0;
  sz << -1, 0, 0, 1;
  sm << 0, 1, 0, 0;
  sp << 0, 0, 1, 0;
  return {Operator(sx), Operator(sz), Operator(sm), Operator(sp)};
}

Operator kron(const Operator& left, const Operator& right) {
  const Index n = left.dim();
  const Index m = right.dim();
  ComplexMatrix out(n * m, n * m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out.block(i * m, j * m, m, m) = left(i, j) * right.matrix();
    }
  }
  return Operator(std::move(out));
}

Operator tensor(const Operator& qubit, const Operator& field) {
  if (qubit.dim() != 2) {
    throw DimensionError("tensor: qubit factor must be 2x2, got dimension " +
                         std::to_string(qubit.dim()));
  }
  if (field.dim() < 2) {
    throw DimensionError("tensor: field factor must have dimension >= 2");
  }
  return kron(qubit, field);
}

PureState::PureState(ComplexVector amplitudes) : v_(std::move(amplitudes)) {
  const double n = v_.norm();
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw InvalidArgument("pure state is not normalized (norm " + std::to_string(n) + ")");
  }
}

PureState PureState::basis(Qubit q, int n, int n_max) {
  if (n_max < 1 || n < 0 || n > n_max) {
    throw InvalidArgument("basis state |q," + std::to_string(n) +
                          "> outside truncation n_max=" + std::to_string(n_max));
  }
  const HilbertSpace space{n_max};
  ComplexVector v = ComplexVector::Zero(space.dim());
  v(space.index(q, n)) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw DimensionError("density matrix must be square");
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw InvalidArgument("density matrix trace " + std::to_string(tr) + " != 1");
  }
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermiticityTolerance) {
    throw InvalidArgument("density matrix not Hermitian (error " + std::to_string(herm) + ")");
  }
  if (min_eigenvalue() < kEigenvalueFloor) {
    throw InvalidArgument("density matrix has a negative eigenvalue " +
                          std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const auto& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
  return rho_.squaredNorm();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

SystemOperators::SystemOperators(int n_max) : space{n_max} {
  const auto [a, ad] = ladder_ops(n_max);
  const auto q = qubit_ops();
  const Operator id_field = Operator::identity(space.field_dim());
  const Operator id_qubit = Operator::identity(2);
  number = tensor(id_qubit, ad * a);
  sigma_z = tensor(q.sigma_z, id_field);
  excited = tensor(q.sigma_plus * q.sigma_minus, id_field);
  lowering = tensor(q.sigma_minus, id_field);
  interaction = tensor(q.sigma_x, a + ad);
  anti_jc = tensor(q.sigma_plus, ad) + tensor(q.sigma_minus, a);
}

double expectation(const Operator& a, const PureState& psi) {
  require_same_dim(a.dim(), psi.dim(), "expectation");
  require_observable(a);
  const auto& v = psi.amplitudes();
  return checked_real(v.dot(a.matrix() * v));
}

double expectation(const Operator& a, const DensityMatrix& rho) {
  require_same_dim(a.dim(), rho.dim(), "expectation");
  require_observable(a);
  return checked_real((a.matrix() * rho.matrix()).trace());
}

}  // namespace relmotion
