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

#ifndef QREPSIM_DENSITY_H
#define QREPSIM_DENSITY_H

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

/// Small dense multi-qubit states and the channels used by the simulator.
///
/// Register convention (used everywhere in this library): qubit 0 is the
/// least significant bit of a basis index. A ket written |q_{n-1} ... q_1 q_0>
/// has index sum_k q_k 2^k, so `tensor_product(a, b)` is the Kronecker product
/// a (x) b with b occupying the low qubits. Pauli label strings are written in
/// the same most-significant-first order: "XZ" is X on qubit 1, Z on qubit 0.
///
/// |0> is spin-up / H polarization, |1> is spin-down / V polarization.
namespace qrepsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

/// Largest register any operation will build.
inline constexpr int kMaxQubits = 6;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kNormTol = 1e-10;

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus,
    BellKind::PsiMinus};

std::string_view to_string(BellKind kind);

/// Normalized state vector over 2^n amplitudes. The global phase is fixed so
/// the first nonzero amplitude is real and positive.
class PureState {
 public:
  /// Throws std::invalid_argument unless the norm is 1 within kNormTol and the
  /// dimension is a power of two.
  static PureState from_amplitudes(Vector amplitudes);

  /// Normalizes first; throws if the vector is zero.
  static PureState normalized(Vector amplitudes);

  static PureState basis(int num_qubits, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  int num_qubits() const { return num_qubits_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_(i); }

 private:
  PureState(Vector amplitudes, int num_qubits);

  Vector amplitudes_;
  int num_qubits_ = 0;
};

/// Hermitian, unit-trace operator on 2^n dimensions. Instances built with
/// `from_matrix` are also positive semidefinite; `hermitian_unit_trace` skips
/// that check for estimators that must report unphysical results as-is.
class DensityOperator {
 public:
  static DensityOperator from_matrix(Matrix m);
  static DensityOperator hermitian_unit_trace(Matrix m);
  static DensityOperator from_pure(const PureState& psi);
  static DensityOperator maximally_mixed(int num_qubits);
  static DensityOperator basis_state(int num_qubits, int index);
  /// sum_i w_i rho_i; weights must be nonnegative and sum to 1.
  static DensityOperator mixture(std::span<const double> weights,
                                 std::span<const DensityOperator> states);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  int num_qubits() const { return num_qubits_; }
  const Matrix& matrix() const { return matrix_; }
  Complex operator()(int r, int c) const { return matrix_(r, c); }

  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;
  double min_eigenvalue() const;
  bool is_positive(double tol = kPsdTol) const { return min_eigenvalue() >= -tol; }
  double purity() const;

 private:
  DensityOperator(Matrix m, int num_qubits);

  Matrix matrix_;
  int num_qubits_ = 0;
};

/// One Pauli label per qubit, most significant qubit first.
class PauliObservable {
 public:
  enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

  /// Parses e.g. "XZ"; throws std::invalid_argument on other characters.
  static PauliObservable parse(std::string_view labels);

  int num_qubits() const { return static_cast<int>(labels_.size()); }
  /// Label acting on `qubit` (qubit 0 = last character).
  Pauli on_qubit(int qubit) const;
  std::string str() const;
  Matrix matrix() const;

 private:
  std::vector<Pauli> labels_;  // most significant first
};

Matrix2 pauli_matrix(PauliObservable::Pauli p);

/// Orthonormal single-qubit measurement basis: outcome 0 projects on `zero`.
struct QubitBasis {
  Vector2 zero;
  Vector2 one;

  /// Throws std::invalid_argument unless orthonormal within kNormTol.
  static QubitBasis make(Vector2 zero, Vector2 one);
  /// {|0>, |1>}: spin {up, down}, polarization {H, V}.
  static QubitBasis z();
  /// {(|0>+|1>)/sqrt2, (|0>-|1>)/sqrt2}: spin {right, left}, diagonal/antidiagonal.
  static QubitBasis x();
  /// {(|0>+i|1>)/sqrt2, (|0>-i|1>)/sqrt2}: polarization {sigma+, sigma-}.
  static QubitBasis y();

  /// Unitary whose rows are <zero| and <one|: maps the basis onto |0>, |1>.
  Matrix2 to_computational() const;
};

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b,
                               int max_qubits = kMaxQubits);
PureState tensor_product(const PureState& a, const PureState& b,
                         int max_qubits = kMaxQubits);

/// Keeps `keep` (any order, no duplicates). Qubit k of the result is the k-th
/// smallest kept index.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep);

PureState bell_state(BellKind kind);

/// <target|rho|target>, clamped to [0, 1].
double fidelity(const DensityOperator& rho, const PureState& target);

/// Tr[rho P], real part.
double pauli_expectation(const DensityOperator& rho, const PauliObservable& obs);

double trace_distance(const DensityOperator& a, const DensityOperator& b);

/// Scales the off-diagonal blocks of `qubit` (in its Z basis) by 1 - strength.
DensityOperator apply_dephasing(const DensityOperator& rho, int qubit, double strength);

/// rho -> (1 - p) rho + p I/d.
DensityOperator depolarize(const DensityOperator& rho, double p);

/// Lifts `op` (2^k square, acting on `qubits` with qubits[0] as its least
/// significant qubit) to the full register.
Matrix embed_operator(const Matrix& op, std::span<const int> qubits, int num_qubits);

/// U rho U^dagger with U acting on `qubits`.
DensityOperator apply_unitary(const DensityOperator& rho, const Matrix& unitary,
                              std::span<const int> qubits);

/// Unitary basis change on one qubit: afterwards outcome 0 of `basis` reads as |0>.
DensityOperator change_local_basis(const DensityOperator& rho, int qubit,
                                   const QubitBasis& basis);

struct MeasurementBranches {
  std::array<double, 2> probability{};
  /// Absent when the branch probability is zero.
  std::array<std::optional<DensityOperator>, 2> post_state;
};

MeasurementBranches projective_measure(const DensityOperator& rho, int qubit,
                                       const QubitBasis& basis);

/// Probability of two-qubit outcome (a, b) where `qubit_a` is measured in
/// `basis_a` and `qubit_b` in `basis_b`.
double joint_outcome_probability(const DensityOperator& rho, int qubit_a,
                                 const QubitBasis& basis_a, int outcome_a, int qubit_b,
                                 const QubitBasis& basis_b, int outcome_b);

struct Projection {
  double probability = 0.0;
  /// State of the remaining qubits, renormalized. Absent at zero probability.
  std::optional<DensityOperator> remainder;
};

/// Projects `qubits` onto |target> (target's qubit 0 maps to qubits[0]) and
/// traces them out.
Projection project_and_discard(const DensityOperator& rho, std::span<const int> qubits,
                               const PureState& target);

}  // namespace qrepsim

#endif  // QREPSIM_DENSITY_H
