#include "bellcool/tensor.hpp"

#include <Eigen/Eigenvalues>

namespace bellcool {

HilbertSpace::HilbertSpace(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.empty()) throw std::invalid_argument("HilbertSpace: no subsystems");
  if (!labels_.empty() && labels_.size() != dims_.size())
    throw std::invalid_argument("HilbertSpace: label count does not match dims");
  total_dim_ = 1;
  for (int d : dims_) {
    if (d < 2) throw std::invalid_argument("HilbertSpace: every dim must be >= 2");
    total_dim_ *= d;
  }
  strides_.assign(dims_.size(), 1);
  for (int s = static_cast<int>(dims_.size()) - 2; s >= 0; --s)
    strides_[s] = strides_[s + 1] * dims_[s + 1];
}

int HilbertSpace::index(const std::vector<int>& sub) const {
  if (sub.size() != dims_.size())
    throw std::invalid_argument("HilbertSpace::index: wrong arity");
  int idx = 0;
  for (size_t s = 0; s < sub.size(); ++s) {
    if (sub[s] < 0 || sub[s] >= dims_[s])
      throw std::invalid_argument("HilbertSpace::index: index out of range");
    idx += sub[s] * strides_[s];
  }
  return idx;
}

Operator::Operator(HilbertSpace space, Matrix entries)
    : space_(std::move(space)), m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() != space_.total_dim())
    throw std::invalid_argument("Operator: matrix does not match space dimension");
}

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_unitary(double tol) const {
  Matrix p = m_.adjoint() * m_;
  p -= Matrix::Identity(m_.rows(), m_.cols());
  return p.cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::operator+(const Operator& o) const {
  if (space_ != o.space_) throw std::invalid_argument("Operator+: space mismatch");
  return Operator(space_, m_ + o.m_);
}

Operator Operator::operator-(const Operator& o) const {
  if (space_ != o.space_) throw std::invalid_argument("Operator-: space mismatch");
  return Operator(space_, m_ - o.m_);
}

Operator Operator::operator*(const Operator& o) const {
  if (space_ != o.space_) throw std::invalid_argument("Operator*: space mismatch");
  return Operator(space_, m_ * o.m_);
}

Operator& Operator::operator+=(const Operator& o) {
  if (space_ != o.space_) throw std::invalid_argument("Operator+=: space mismatch");
  m_ += o.m_;
  return *this;
}

State::State(HilbertSpace space, Matrix density, bool validate)
    : space_(std::move(space)), rho_(std::move(density)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() != space_.total_dim())
    throw std::invalid_argument("State: matrix does not match space dimension");
  if (validate) {
    if (trace_error() > kTraceTol)
      throw std::invalid_argument("State: trace deviates from 1 beyond tolerance");
    if (hermiticity_error() > kHermTol)
      throw std::invalid_argument("State: density matrix is not Hermitian");
    if (min_eigenvalue() < kEigFloor)
      throw std::invalid_argument("State: negative eigenvalue beyond floor");
  }
}

State::State(HilbertSpace space, const Vector& psi)
    : space_(std::move(space)) {
  if (psi.size() != space_.total_dim())
    throw std::invalid_argument("State: vector does not match space dimension");
  double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-8)
    throw std::invalid_argument("State: pure-state vector is not normalized");
  rho_ = psi * psi.adjoint();
}

double State::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double State::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()),
                                           Eigen::EigenvaluesOnly);
  double mn = es.eigenvalues().minCoeff();
  return mn < 0.0 ? mn : 0.0;
}

Matrix destroy_matrix(int dim) {
  if (dim < 2) throw std::invalid_argument("destroy: dim must be >= 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix pauli_matrix(PauliAxis which) {
  Matrix m = Matrix::Zero(2, 2);
  const Complex i(0.0, 1.0);
  switch (which) {
    case PauliAxis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliAxis::Y:
      // Basis order (|g>, |e>): chosen so that (x + i y)/2 = |e><g|.
      m(0, 1) = i;
      m(1, 0) = -i;
      break;
    case PauliAxis::Z:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
    case PauliAxis::Plus:
      m(1, 0) = 1.0;
      break;
    case PauliAxis::Minus:
      m(0, 1) = 1.0;
      break;
  }
  return m;
}

Matrix identity_matrix(int dim) { return Matrix::Identity(dim, dim); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator embed(const Matrix& op, int slot, const HilbertSpace& space) {
  if (slot < 0 || slot >= space.num_subsystems())
    throw std::invalid_argument("embed: slot out of range");
  if (op.rows() != op.cols() || op.rows() != space.dim(slot))
    throw std::invalid_argument("embed: operator does not match slot dimension");

  const int d = space.dim(slot);
  const int stride = space.stride(slot);
  const int total = space.total_dim();
  // outer runs over subsystems left of `slot`, inner over those right of it
  const int inner = stride;
  const int outer = total / (d * inner);

  Matrix out = Matrix::Zero(total, total);
  for (int o = 0; o < outer; ++o) {
    const int base = o * d * inner;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const Complex v = op(r, c);
        if (v == Complex(0.0)) continue;
        for (int k = 0; k < inner; ++k) out(base + r * inner + k, base + c * inner + k) = v;
      }
  }
  return Operator(space, std::move(out));
}

Operator identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

Operator destroy_on(const HilbertSpace& space, int slot) {
  return embed(destroy_matrix(space.dim(slot)), slot, space);
}

Operator pauli_on(const HilbertSpace& space, PauliAxis which, int slot) {
  return embed(pauli_matrix(which), slot, space);
}

Operator swap_subsystems(const HilbertSpace& space,
                         const std::vector<std::pair<int, int>>& pairs) {
  const int n = space.num_subsystems();
  std::vector<int> perm(n);
  for (int s = 0; s < n; ++s) perm[s] = s;
  for (auto [a, b] : pairs) {
    if (space.dim(a) != space.dim(b))
      throw std::invalid_argument("swap_subsystems: dimensions differ");
    std::swap(perm[a], perm[b]);
  }
  const int total = space.total_dim();
  Matrix p = Matrix::Zero(total, total);
  std::vector<int> sub(n), dst(n);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int s = 0; s < n; ++s) {
      sub[s] = rem / space.stride(s);
      rem %= space.stride(s);
    }
    for (int s = 0; s < n; ++s) dst[s] = sub[perm[s]];
    p(space.index(dst), idx) = 1.0;
  }
  return Operator(space, std::move(p));
}

}  // namespace bellcool
