#pragma once

// Dense linear algebra for a two-level system tensored with one truncated
// bosonic mode.
//
// Basis convention (used everywhere in the library):
//   index = q * (n_max + 1) + n,   q = 0 for |g>, q = 1 for |e>,   n = photon number.
// |g> is the sigma_z = -1 eigenstate and |e> the sigma_z = +1 eigenstate.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "relmotion/error.hpp"

namespace relmotion {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

enum class Qubit : int { ground = 0, excited = 1 };

/// Square dense complex matrix acting on a fixed-dimension Hilbert space.
class Operator {
 public:
  Operator() = default;
  explicit Operator(ComplexMatrix m);

  static Operator zero(Index dim);
  static Operator identity(Index dim);

  Index dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(Index row, Index col) const { return m_(row, col); }

  Operator adjoint() const { return Operator(m_.adjoint()); }

  /// max_ij |A_ij - conj(A_ji)|
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
  friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  ComplexMatrix m_;
};

Operator commutator(const Operator& a, const Operator& b);

/// Max-norm distance; dimensions must agree.
double max_abs_difference(const Operator& a, const Operator& b);

struct LadderOps {
  Operator annihilation;
  Operator creation;
};

/// a and a^dagger on the (n_max + 1)-dimensional Fock space; n_max >= 1.
LadderOps ladder_ops(int n_max);

struct QubitOps {
  Operator sigma_x;
  Operator sigma_z;
  Operator sigma_minus;  // |g><e|
  Operator sigma_plus;   // |e><g|
};

QubitOps qubit_ops();

/// General Kronecker product, left factor major.
Operator kron(const Operator& left, const Operator& right);

/// Qubit (2x2) tensor field ((n_max+1)x(n_max+1)) in the library's basis order.
Operator tensor(const Operator& qubit, const Operator& field);

/// Normalized state vector.
class PureState {
 public:
  static constexpr double kNormTolerance = 1e-8;

  /// Throws InvalidArgument when | ||psi|| - 1 | > kNormTolerance.
  explicit PureState(ComplexVector amplitudes);

  /// Basis state |q, n> for the given truncation.
  static PureState basis(Qubit q, int n, int n_max);

  Index dim() const noexcept { return v_.size(); }
  const ComplexVector& amplitudes() const noexcept { return v_; }
  double norm() const { return v_.norm(); }

 private:
  ComplexVector v_;
};

/// Density matrix with trace, Hermiticity and positivity checked at construction.
class DensityMatrix {
 public:
  static constexpr double kTraceTolerance = 1e-7;
  static constexpr double kHermiticityTolerance = 1e-10;
  static constexpr double kEigenvalueFloor = -1e-8;

  explicit DensityMatrix(ComplexMatrix rho);

  static DensityMatrix from_pure(const PureState& psi);

  Index dim() const noexcept { return rho_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return rho_; }

  double trace() const { return rho_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;

 private:
  ComplexMatrix rho_;
};

/// Hilbert-space bookkeeping for a given Fock truncation.
struct HilbertSpace {
  int n_max = 1;

  Index field_dim() const noexcept { return n_max + 1; }
  Index dim() const noexcept { return 2 * (n_max + 1); }
  Index index(Qubit q, int n) const noexcept {
    return static_cast<Index>(q) * field_dim() + n;
  }
};

/// Frequently used composite operators on qubit (x) field.
struct SystemOperators {
  explicit SystemOperators(int n_max);

  HilbertSpace space;
  Operator number;            // 1 (x) a^dagger a
  Operator sigma_z;           // sigma_z (x) 1
  Operator excited;           // sigma_plus sigma_minus (x) 1
  Operator lowering;          // sigma_minus (x) 1
  Operator interaction;       // sigma_x (x) (a + a^dagger)
  Operator anti_jc;           // sigma_plus (x) a^dagger + sigma_minus (x) a
};

/// <psi|A|psi>. A must be Hermitian within 1e-10; an imaginary residue above
/// 1e-9 is reported as NumericalError.
double expectation(const Operator& a, const PureState& psi);
double expectation(const Operator& a, const DensityMatrix& rho);

}  // namespace relmotion
