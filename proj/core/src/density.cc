// Copyright 2026 The qrepsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrepsim/density.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qrepsim {

namespace {

int qubits_for_dim(Eigen::Index dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<unsigned long>(dim))) {
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  return std::countr_zero(static_cast<unsigned long>(dim));
}

void check_qubit(int qubit, int num_qubits) {
  if (qubit < 0 || qubit >= num_qubits) {
    throw std::invalid_argument("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(num_qubits) +
                                "-qubit register");
  }
}

void check_distinct_qubits(std::span<const int> qubits, int num_qubits) {
  for (size_t i = 0; i < qubits.size(); ++i) {
    check_qubit(qubits[i], num_qubits);
    for (size_t j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) throw std::invalid_argument("duplicate qubit index");
    }
  }
}

// Places bit k of `value` at position positions[k].
int scatter_bits(int value, std::span<const int> positions) {
  int out = 0;
  for (size_t k = 0; k < positions.size(); ++k) {
    if ((value >> k) & 1) out |= 1 << positions[k];
  }
  return out;
}

// Reads bit positions[k] of `index` into bit k.
int gather_bits(int index, std::span<const int> positions) {
  int out = 0;
  for (size_t k = 0; k < positions.size(); ++k) {
    if ((index >> positions[k]) & 1) out |= 1 << k;
  }
  return out;
}

std::vector<int> complement(std::span<const int> qubits, int num_qubits) {
  std::vector<int> rest;
  for (int q = 0; q < num_qubits; ++q) {
    if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) rest.push_back(q);
  }
  return rest;
}

Vector fix_global_phase(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-14) {
      const Complex phase = std::conj(v(i)) / std::abs(v(i));
      v *= phase;
      v(i) = Complex(v(i).real(), 0.0);
      break;
    }
  }
  return v;
}

}  // namespace

std::string_view to_string(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus: return "PhiPlus";
    case BellKind::PhiMinus: return "PhiMinus";
    case BellKind::PsiPlus: return "PsiPlus";
    case BellKind::PsiMinus: return "PsiMinus";
  }
  return "?";
}

// ---------------------------------------------------------------- PureState

PureState::PureState(Vector amplitudes, int num_qubits)
    : amplitudes_(std::move(amplitudes)), num_qubits_(num_qubits) {}

PureState PureState::from_amplitudes(Vector amplitudes) {
  const int n = qubits_for_dim(amplitudes.size());
  if (std::abs(amplitudes.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument("pure state amplitudes are not unit norm");
  }
  return PureState(fix_global_phase(std::move(amplitudes)), n);
}

PureState PureState::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm < 1e-14) throw std::invalid_argument("cannot normalize a zero vector");
  return from_amplitudes(amplitudes / norm);
}

PureState PureState::basis(int num_qubits, int index) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::length_error("register size out of range");
  }
  const int dim = 1 << num_qubits;
  if (index < 0 || index >= dim) throw std::invalid_argument("basis index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v), num_qubits);
}

// ---------------------------------------------------------- DensityOperator

DensityOperator::DensityOperator(Matrix m, int num_qubits)
    : matrix_(std::move(m)), num_qubits_(num_qubits) {}

DensityOperator DensityOperator::hermitian_unit_trace(Matrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
  const int n = qubits_for_dim(m.rows());
  if (n > kMaxQubits) throw std::length_error("register exceeds qubit limit");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - Complex(1.0)) > kTraceTol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  // Symmetrize away round-off so downstream eigen-solvers see an exact Hermitian.
  Matrix h = 0.5 * (m + m.adjoint());
  return DensityOperator(std::move(h), n);
}

DensityOperator DensityOperator::from_matrix(Matrix m) {
  DensityOperator rho = hermitian_unit_trace(std::move(m));
  if (!rho.is_positive()) {
    throw std::invalid_argument("density matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(rho.min_eigenvalue()) + ")");
  }
  return rho;
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  const Vector& v = psi.amplitudes();
  return DensityOperator(v * v.adjoint(), psi.num_qubits());
}

DensityOperator DensityOperator::maximally_mixed(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::length_error("register size out of range");
  }
  const int dim = 1 << num_qubits;
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim), num_qubits);
}

DensityOperator DensityOperator::basis_state(int num_qubits, int index) {
  return from_pure(PureState::basis(num_qubits, index));
}

DensityOperator DensityOperator::mixture(std::span<const double> weights,
                                         std::span<const DensityOperator> states) {
  if (weights.size() != states.size() || states.empty()) {
    throw std::invalid_argument("mixture needs one weight per state");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kTraceTol) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  Matrix m = Matrix::Zero(states[0].dim(), states[0].dim());
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != states[0].dim()) {
      throw std::invalid_argument("mixture components differ in dimension");
    }
    m += weights[i] * states[i].matrix();
  }
  return DensityOperator(std::move(m), states[0].num_qubits());
}

Eigen::VectorXd DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double DensityOperator::min_eigenvalue() const { return eigenvalues()(0); }

double DensityOperator::purity() const { return (matrix_ * matrix_).trace().real(); }

// ----------------------------------------------------------- PauliObservable

PauliObservable PauliObservable::parse(std::string_view labels) {
  if (labels.empty() || labels.size() > static_cast<size_t>(kMaxQubits)) {
    throw std::invalid_argument("Pauli label length out of range");
  }
  PauliObservable obs;
  for (char c : labels) {
    switch (c) {
      case 'I': case 'X': case 'Y': case 'Z':
        obs.labels_.push_back(static_cast<Pauli>(c));
        break;
      default:
        throw std::invalid_argument(std::string("invalid Pauli label '") + c + "'");
    }
  }
  return obs;
}

PauliObservable::Pauli PauliObservable::on_qubit(int qubit) const {
  check_qubit(qubit, num_qubits());
  return labels_[labels_.size() - 1 - static_cast<size_t>(qubit)];
}

std::string PauliObservable::str() const {
  std::string s;
  for (Pauli p : labels_) s.push_back(static_cast<char>(p));
  return s;
}

Matrix2 pauli_matrix(PauliObservable::Pauli p) {
  Matrix2 m;
  switch (p) {
    case PauliObservable::Pauli::I: m << 1, 0, 0, 1; break;
    case PauliObservable::Pauli::X: m << 0, 1, 1, 0; break;
    case PauliObservable::Pauli::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case PauliObservable::Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix PauliObservable::matrix() const {
  Matrix m = Matrix::Identity(1, 1);
  for (Pauli p : labels_) {
    const Matrix2 s = pauli_matrix(p);
    Matrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        next.block(2 * r, 2 * c, 2, 2) = m(r, c) * s;
      }
    }
    m = std::move(next);
  }
  return m;
}

// ---------------------------------------------------------------- QubitBasis

QubitBasis QubitBasis::make(Vector2 zero, Vector2 one) {
  if (std::abs(zero.norm() - 1.0) > kNormTol || std::abs(one.norm() - 1.0) > kNormTol ||
      std::abs(zero.dot(one)) > kNormTol) {
    throw std::invalid_argument("measurement basis is not orthonormal");
  }
  return QubitBasis{std::move(zero), std::move(one)};
}

QubitBasis QubitBasis::z() { return QubitBasis{Vector2(1, 0), Vector2(0, 1)}; }

QubitBasis QubitBasis::x() {
  const double h = M_SQRT1_2;
  return QubitBasis{Vector2(h, h), Vector2(h, -h)};
}

QubitBasis QubitBasis::y() {
  const double h = M_SQRT1_2;
  return QubitBasis{Vector2(h, Complex(0, h)), Vector2(h, Complex(0, -h))};
}

Matrix2 QubitBasis::to_computational() const {
  Matrix2 u;
  u.row(0) = zero.adjoint();
  u.row(1) = one.adjoint();
  return u;
}

// ------------------------------------------------------------- operations

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b,
                               int max_qubits) {
  const int n = a.num_qubits() + b.num_qubits();
  if (n > max_qubits) {
    throw std::length_error("tensor product would exceed " + std::to_string(max_qubits) +
                            " qubits");
  }
  const Matrix& ma = a.matrix();
  const Matrix& mb = b.matrix();
  Matrix out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index r = 0; r < ma.rows(); ++r) {
    for (Eigen::Index c = 0; c < ma.cols(); ++c) {
      out.block(r * mb.rows(), c * mb.cols(), mb.rows(), mb.cols()) = ma(r, c) * mb;
    }
  }
  return DensityOperator::hermitian_unit_trace(std::move(out));
}

PureState tensor_product(const PureState& a, const PureState& b, int max_qubits) {
  if (a.num_qubits() + b.num_qubits() > max_qubits) {
    throw std::length_error("tensor product would exceed " + std::to_string(max_qubits) +
                            " qubits");
  }
  Vector out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  return PureState::normalized(std::move(out));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep_in) {
  if (keep_in.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const int n = rho.num_qubits();
  check_distinct_qubits(keep_in, n);
  std::vector<int> keep(keep_in.begin(), keep_in.end());
  std::sort(keep.begin(), keep.end());
  const std::vector<int> traced = complement(keep, n);

  const int kdim = 1 << keep.size();
  const int tdim = 1 << traced.size();
  Matrix out = Matrix::Zero(kdim, kdim);
  for (int r = 0; r < kdim; ++r) {
    const int rbits = scatter_bits(r, keep);
    for (int c = 0; c < kdim; ++c) {
      const int cbits = scatter_bits(c, keep);
      Complex acc = 0.0;
      for (int t = 0; t < tdim; ++t) {
        const int tbits = scatter_bits(t, traced);
        acc += rho(rbits | tbits, cbits | tbits);
      }
      out(r, c) = acc;
    }
  }
  return DensityOperator::hermitian_unit_trace(std::move(out));
}

PureState bell_state(BellKind kind) {
  const double h = M_SQRT1_2;
  Vector v = Vector::Zero(4);
  switch (kind) {
    case BellKind::PhiPlus: v << h, 0, 0, h; break;
    case BellKind::PhiMinus: v << h, 0, 0, -h; break;
    case BellKind::PsiPlus: v << 0, h, h, 0; break;
    case BellKind::PsiMinus: v << 0, h, -h, 0; break;
  }
  return PureState::from_amplitudes(std::move(v));
}

double fidelity(const DensityOperator& rho, const PureState& target) {
  if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Vector& psi = target.amplitudes();
  const double f = psi.dot(rho.matrix() * psi).real();
  return std::clamp(f, 0.0, 1.0);
}

double pauli_expectation(const DensityOperator& rho, const PauliObservable& obs) {
  if (obs.num_qubits() != rho.num_qubits()) {
    throw std::invalid_argument("pauli_expectation: dimension mismatch");
  }
  return (rho.matrix() * obs.matrix()).trace().real();
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix() - b.matrix(),
                                               Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

DensityOperator apply_dephasing(const DensityOperator& rho, int qubit, double strength) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw std::invalid_argument("dephasing strength must lie in [0, 1]");
  }
  check_qubit(qubit, rho.num_qubits());
  Matrix m = rho.matrix();
  const double keep = 1.0 - strength;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (((r >> qubit) & 1) != ((c >> qubit) & 1)) m(r, c) *= keep;
    }
  }
  return DensityOperator::hermitian_unit_trace(std::move(m));
}

DensityOperator depolarize(const DensityOperator& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("depolarizing probability must lie in [0, 1]");
  }
  const Matrix mixed =
      Matrix::Identity(rho.dim(), rho.dim()) / static_cast<double>(rho.dim());
  return DensityOperator::hermitian_unit_trace((1.0 - p) * rho.matrix() + p * mixed);
}

Matrix embed_operator(const Matrix& op, std::span<const int> qubits, int num_qubits) {
  check_distinct_qubits(qubits, num_qubits);
  if (op.rows() != (Eigen::Index{1} << qubits.size()) || op.rows() != op.cols()) {
    throw std::invalid_argument("operator size does not match its qubit list");
  }
  const int dim = 1 << num_qubits;
  const int mask = scatter_bits((1 << qubits.size()) - 1, qubits);
  Matrix full = Matrix::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      if ((r & ~mask) != (c & ~mask)) continue;
      full(r, c) = op(gather_bits(r, qubits), gather_bits(c, qubits));
    }
  }
  return full;
}

DensityOperator apply_unitary(const DensityOperator& rho, const Matrix& unitary,
                              std::span<const int> qubits) {
  const Matrix u = embed_operator(unitary, qubits, rho.num_qubits());
  return DensityOperator::hermitian_unit_trace(u * rho.matrix() * u.adjoint());
}

DensityOperator change_local_basis(const DensityOperator& rho, int qubit,
                                   const QubitBasis& basis) {
  const QubitBasis checked = QubitBasis::make(basis.zero, basis.one);
  const int q[] = {qubit};
  return apply_unitary(rho, checked.to_computational(), q);
}

MeasurementBranches projective_measure(const DensityOperator& rho, int qubit,
                                       const QubitBasis& basis) {
  const QubitBasis checked = QubitBasis::make(basis.zero, basis.one);
  check_qubit(qubit, rho.num_qubits());
  const int q[] = {qubit};
  MeasurementBranches out;
  for (int outcome = 0; outcome < 2; ++outcome) {
    const Vector2& v = outcome == 0 ? checked.zero : checked.one;
    const Matrix proj = embed_operator(v * v.adjoint(), q, rho.num_qubits());
    const Matrix branch = proj * rho.matrix() * proj;
    const double p = std::max(0.0, branch.trace().real());
    out.probability[outcome] = p;
    if (p > 1e-15) {
      out.post_state[outcome] = DensityOperator::hermitian_unit_trace(branch / p);
    }
  }
  // Renormalize round-off so the two branches sum to exactly one.
  const double total = out.probability[0] + out.probability[1];
  out.probability[0] /= total;
  out.probability[1] /= total;
  return out;
}

double joint_outcome_probability(const DensityOperator& rho, int qubit_a,
                                 const QubitBasis& basis_a, int outcome_a, int qubit_b,
                                 const QubitBasis& basis_b, int outcome_b) {
  const int qs[] = {qubit_a, qubit_b};
  check_distinct_qubits(qs, rho.num_qubits());
  const Vector2& va = outcome_a == 0 ? basis_a.zero : basis_a.one;
  const Vector2& vb = outcome_b == 0 ? basis_b.zero : basis_b.one;
  const int qa[] = {qubit_a};
  const int qb[] = {qubit_b};
  const Matrix pa = embed_operator(va * va.adjoint(), qa, rho.num_qubits());
  const Matrix pb = embed_operator(vb * vb.adjoint(), qb, rho.num_qubits());
  return std::max(0.0, (pa * pb * rho.matrix()).trace().real());
}

Projection project_and_discard(const DensityOperator& rho, std::span<const int> qubits,
                               const PureState& target) {
  const int n = rho.num_qubits();
  check_distinct_qubits(qubits, n);
  if (target.num_qubits() != static_cast<int>(qubits.size())) {
    throw std::invalid_argument("projection target size does not match qubit list");
  }
  if (static_cast<int>(qubits.size()) >= n) {
    throw std::invalid_argument("projection must leave at least one qubit");
  }
  const std::vector<int> rest = complement(qubits, n);
  const int rdim = 1 << rest.size();
  const int pdim = target.dim();
  const Vector& phi = target.amplitudes();

  Matrix m = Matrix::Zero(rdim, rdim);
  for (int r = 0; r < rdim; ++r) {
    const int rbits = scatter_bits(r, rest);
    for (int c = 0; c < rdim; ++c) {
      const int cbits = scatter_bits(c, rest);
      Complex acc = 0.0;
      for (int s = 0; s < pdim; ++s) {
        if (phi(s) == Complex(0.0)) continue;
        const int sbits = scatter_bits(s, qubits);
        for (int t = 0; t < pdim; ++t) {
          if (phi(t) == Complex(0.0)) continue;
          acc += std::conj(phi(s)) * rho(rbits | sbits, cbits | scatter_bits(t, qubits)) * phi(t);
        }
      }
      m(r, c) = acc;
    }
  }
  Projection out;
  out.probability = std::max(0.0, m.trace().real());
  if (out.probability > 1e-15) {
    out.remainder = DensityOperator::hermitian_unit_trace(m / out.probability);
  }
  return out;
}

}  // namespace qrepsim
