#pragma once

// Labeled tensor-product Hilbert spaces and the dense complex operator
// algebra used by every other layer: ladder operators, Pauli matrices,
// single-slot embeddings, Kronecker products, and density-matrix states.
//
// Conventions (fixed project-wide):
//   - qubit basis index 0 = |g>, index 1 = |e>; sigma_z = diag(-1 on |g>, +1 on |e>)
//   - Fock index = photon number
//   - subsystem order [cavity A, cavity B, qubit A, qubit B] for the full device
//   - frequencies, couplings and rates are linear frequencies in GHz,
//     times in microseconds; the angular conversion 2*pi*1000 rad/(GHz*us)
//     is applied once, inside the evolution routines (see units.hpp).

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellcool {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Ordered list of subsystem dimensions with human-readable labels.
/// The order is fixed at construction; all operators combined in an
/// expression must share the same space.
class HilbertSpace {
 public:
  HilbertSpace() = default;
  HilbertSpace(std::vector<int> dims, std::vector<std::string> labels);

  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  int dim(int slot) const { return dims_.at(slot); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int total_dim() const { return total_dim_; }

  /// Row-major stride of subsystem `slot` in the composite index.
  int stride(int slot) const { return strides_.at(slot); }

  /// Composite basis index from per-subsystem indices.
  int index(const std::vector<int>& sub) const;

  bool operator==(const HilbertSpace& other) const { return dims_ == other.dims_; }
  bool operator!=(const HilbertSpace& other) const { return !(*this == other); }

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::vector<int> strides_;
  int total_dim_ = 0;
};

/// Dense complex operator attached to a HilbertSpace.
class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpace space, Matrix entries);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  Operator adjoint() const { return Operator(space_, m_.adjoint()); }
  Complex trace() const { return m_.trace(); }

  bool is_hermitian(double tol) const;
  bool is_unitary(double tol) const;

  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(const Operator& o) const;
  Operator& operator+=(const Operator& o);
  friend Operator operator*(Complex c, const Operator& a) {
    return Operator(a.space_, c * a.m_);
  }
  friend Operator operator*(double c, const Operator& a) {
    return Operator(a.space_, c * a.m_);
  }

 private:
  HilbertSpace space_;
  Matrix m_;
};

/// Density matrix (or pure state promoted to one) on a HilbertSpace.
/// Construction validates trace, Hermiticity and the eigenvalue floor.
class State {
 public:
  State() = default;
  /// From a density matrix. Throws std::invalid_argument on violated invariants.
  State(HilbertSpace space, Matrix density, bool validate = true);
  /// From a pure-state vector (implicit outer product).
  State(HilbertSpace space, const Vector& psi);

  const HilbertSpace& space() const { return space_; }
  const Matrix& density() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

  double trace_error() const { return std::abs(rho_.trace() - Complex(1.0)); }
  double hermiticity_error() const;
  /// Most negative eigenvalue (0 if spectrum is non-negative).
  double min_eigenvalue() const;

  static constexpr double kTraceTol = 1e-9;
  static constexpr double kHermTol = 1e-9;
  static constexpr double kEigFloor = -1e-8;

 private:
  HilbertSpace space_;
  Matrix rho_;
};

/// Annihilation operator on a truncated Fock space: <n-1|a|n> = sqrt(n).
/// Throws std::invalid_argument for dim < 2.
Matrix destroy_matrix(int dim);

enum class PauliAxis { X, Y, Z, Plus, Minus };

/// 2x2 Pauli matrices in the (|g>, |e>) basis, sigma_z = diag(-1, +1),
/// sigma_plus |g> = |e>.
Matrix pauli_matrix(PauliAxis which);

Matrix identity_matrix(int dim);

/// Kronecker product; dims concatenate (left factor is the slower index).
Matrix kron(const Matrix& a, const Matrix& b);

/// Embed a single-subsystem operator at `slot`, identity elsewhere.
/// Throws on slot out of range or dimension mismatch.
Operator embed(const Matrix& op, int slot, const HilbertSpace& space);

Operator identity(const HilbertSpace& space);

/// Convenience wrappers returning space-attached operators.
Operator destroy_on(const HilbertSpace& space, int slot);
Operator pauli_on(const HilbertSpace& space, PauliAxis which, int slot);

/// Permutation operator exchanging two equal-dimension subsystem pairs,
/// e.g. the A<->B swap used in symmetry tests.
Operator swap_subsystems(const HilbertSpace& space, const std::vector<std::pair<int, int>>& pairs);

}  // namespace bellcool
