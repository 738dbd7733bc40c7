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

#include <gtest/gtest.h>

#include <random>

#include "oracle.h"
#include "qrepsim/source.h"

using namespace qrepsim;

namespace {

DensityOperator rho_m() {
  const double w[] = {0.5, 0.5};
  const DensityOperator parts[] = {DensityOperator::basis_state(2, 0),
                                   DensityOperator::basis_state(2, 3)};
  return DensityOperator::mixture(w, parts);
}

DensityOperator random_state(int dim, std::mt19937_64& rng) {
  return DensityOperator::from_matrix(oracle::to_eigen(oracle::random_density(dim, rng)));
}

void expect_valid(const DensityOperator& rho) {
  const Matrix& m = rho.matrix();
  EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), kHermitianTol);
  EXPECT_NEAR(m.trace().real(), 1.0, kTraceTol);
  EXPECT_GE(rho.min_eigenvalue(), -kPsdTol);
}

}  // namespace

TEST(density, validation_rejects_bad_matrices) {
  Matrix m = Matrix::Identity(4, 4) * 0.25;
  EXPECT_NO_THROW(DensityOperator::from_matrix(m));
  Matrix not_hermitian = m;
  not_hermitian(0, 1) = 0.1;
  EXPECT_THROW(DensityOperator::from_matrix(not_hermitian), std::invalid_argument);
  EXPECT_THROW(DensityOperator::from_matrix(m * 2.0), std::invalid_argument);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(DensityOperator::from_matrix(negative), std::invalid_argument);
  EXPECT_THROW(DensityOperator::from_matrix(Matrix::Identity(3, 3) / 3.0), std::invalid_argument);
}

TEST(density, pure_state_norm_checked) {
  Vector v = Vector::Zero(2);
  v(0) = 1.0;
  v(1) = 1e-3;
  EXPECT_THROW(PureState::from_amplitudes(v), std::invalid_argument);
  EXPECT_NO_THROW(PureState::normalized(v));
}

TEST(density, tensor_of_mixed_is_mixed) {
  const auto r = tensor_product(DensityOperator::maximally_mixed(1), DensityOperator::maximally_mixed(1));
  EXPECT_LE((r.matrix() - Matrix::Identity(4, 4) * 0.25).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(density, tensor_of_basis_states) {
  const auto r = tensor_product(DensityOperator::basis_state(1, 0), DensityOperator::basis_state(1, 1));
  EXPECT_NEAR(std::abs(r(1, 1) - 1.0), 0.0, 1e-15);  // |up down> = |01>
}

TEST(density, tensor_size_limit) {
  const auto big = DensityOperator::maximally_mixed(4);
  EXPECT_THROW(tensor_product(big, big), std::length_error);
  EXPECT_NO_THROW(tensor_product(big, DensityOperator::maximally_mixed(2)));
}

TEST(density, tensor_matches_oracle_kron) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto a = oracle::random_density(2, rng);
    const auto b = oracle::random_density(4, rng);
    const auto got = tensor_product(DensityOperator::from_matrix(oracle::to_eigen(a)),
                                    DensityOperator::from_matrix(oracle::to_eigen(b)));
    EXPECT_LE(oracle::max_abs_diff(oracle::from_eigen(got.matrix()), oracle::kron(a, b)), 1e-14);
  }
}

TEST(density, bell_decomposition_of_two_source_state) {
  // (|up H> - |down V>)/sqrt2 at each node, in the order memA memB photonA photonB.
  const oracle::Vec si = {oracle::kR, 0, 0, -oracle::kR};
  oracle::Vec system(16);
  for (int ma = 0; ma < 2; ++ma)
    for (int pa = 0; pa < 2; ++pa)
      for (int mb = 0; mb < 2; ++mb)
        for (int pb = 0; pb < 2; ++pb)
          system[(ma << 3) | (mb << 2) | (pa << 1) | pb] = si[2 * ma + pa] * si[2 * mb + pb];

  // Same thing through the library: tensor the sources, then permute qubits.
  const PureState lib = tensor_product(simon_irvine_vector(), simon_irvine_vector());
  for (int idx = 0; idx < 16; ++idx) {
    const int ma = (idx >> 3) & 1, pa = (idx >> 2) & 1, mb = (idx >> 1) & 1, pb = idx & 1;
    EXPECT_NEAR(std::abs(lib[idx] - system[(ma << 3) | (mb << 2) | (pa << 1) | pb]), 0.0, 1e-15);
  }

  const double expected[4][4] = {
      {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, -0.5, 0}, {0, 0, 0, -0.5}};
  for (int m = 0; m < 4; ++m) {
    for (int p = 0; p < 4; ++p) {
      const auto mem = bell_state(kAllBellKinds[m]).amplitudes();
      const auto ph = bell_state(kAllBellKinds[p]).amplitudes();
      oracle::Vec basis(16);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) basis[4 * i + j] = mem(i) * ph(j);
      const auto c = oracle::inner(basis, system);
      EXPECT_NEAR(c.real(), expected[m][p], 1e-12) << m << "," << p;
      EXPECT_NEAR(c.imag(), 0.0, 1e-12);
    }
  }
}

TEST(density, partial_trace_cases) {
  const auto phi = DensityOperator::from_pure(bell_state(BellKind::PhiPlus));
  const int q0[] = {0};
  EXPECT_LE((partial_trace(phi, q0).matrix() - Matrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(partial_trace(phi, std::span<const int>{}), std::invalid_argument);
  const int bad[] = {2};
  EXPECT_THROW(partial_trace(phi, bad), std::invalid_argument);
}

TEST(density, partial_trace_recovers_factors) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_state(2, rng);
    const auto b = random_state(4, rng);
    const auto ab = tensor_product(a, b);
    const int keep_a[] = {2};
    const int keep_b[] = {0, 1};
    EXPECT_LE((partial_trace(ab, keep_a).matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((partial_trace(ab, keep_b).matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(density, partial_trace_matches_oracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const auto r = oracle::random_density(8, rng);
    const int keep[] = {2, 0};
    const auto got = partial_trace(DensityOperator::from_matrix(oracle::to_eigen(r)), keep);
    EXPECT_LE(oracle::max_abs_diff(oracle::from_eigen(got.matrix()),
                                   oracle::partial_trace_keep(r, 3, {0, 2})),
              1e-12);
  }
}

TEST(density, psi_minus_memories_after_photon_projection) {
  // Brute force: project photons of Psi-(memories) Psi-(photons) prepared by hand.
  const auto s = simon_irvine_vector();
  const auto src = DensityOperator::from_pure(s);
  // source layout: memory qubit 1, photon qubit 0 -> joint photonB=0, memB=1, photonA=2, memA=3
  const auto joint = tensor_product(src, src);
  const int photons[] = {0, 2};
  const auto proj = project_and_discard(joint, photons, bell_state(BellKind::PsiMinus));
  ASSERT_TRUE(proj.remainder.has_value());
  EXPECT_NEAR(proj.probability, 0.25, 1e-12);
  EXPECT_NEAR(fidelity(*proj.remainder, bell_state(BellKind::PsiMinus)), 1.0, 1e-12);

  // Oracle: the same projector built from loops.
  oracle::Mat p(16);
  const auto pm = oracle::psi_minus();
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const int pi = (((i >> 2) & 1) << 1) | (i & 1);  // (photonA, photonB)
      const int pj = (((j >> 2) & 1) << 1) | (j & 1);
      const bool rest_equal = ((i >> 1) & 1) == ((j >> 1) & 1) && ((i >> 3) & 1) == ((j >> 3) & 1);
      if (rest_equal) p(i, j) = pm[pi] * std::conj(pm[pj]);
    }
  }
  const auto j = oracle::from_eigen(joint.matrix());
  const auto projected = oracle::mul(oracle::mul(p, j), p);
  EXPECT_NEAR(oracle::trace(projected).real(), 0.25, 1e-12);
  const auto mem = oracle::partial_trace_keep(projected, 4, {1, 3});
  EXPECT_NEAR(oracle::expectation(mem, pm) / 0.25, 1.0, 1e-12);
}

TEST(density, bell_states) {
  const auto phi = bell_state(BellKind::PhiPlus).amplitudes();
  EXPECT_NEAR(phi(0).real(), M_SQRT1_2, 1e-15);
  EXPECT_NEAR(phi(3).real(), M_SQRT1_2, 1e-15);
  const auto psi = bell_state(BellKind::PsiMinus).amplitudes();
  EXPECT_NEAR(psi(1).real(), M_SQRT1_2, 1e-15);
  EXPECT_NEAR(psi(2).real(), -M_SQRT1_2, 1e-15);
  for (BellKind a : kAllBellKinds) {
    for (BellKind b : kAllBellKinds) {
      const double ip = std::abs(bell_state(a).amplitudes().dot(bell_state(b).amplitudes()));
      EXPECT_NEAR(ip, a == b ? 1.0 : 0.0, 1e-15);
    }
    EXPECT_LE(oracle::max_abs_diff(oracle::outer(oracle::bell(a)),
                                   oracle::from_eigen(DensityOperator::from_pure(bell_state(a)).matrix())),
              1e-15);
  }
}

TEST(density, fidelity_cases) {
  const auto phi = bell_state(BellKind::PhiPlus);
  EXPECT_NEAR(fidelity(DensityOperator::from_pure(phi), phi), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(rho_m(), phi), 0.5, 1e-15);
  for (BellKind k : kAllBellKinds) {
    EXPECT_NEAR(fidelity(DensityOperator::maximally_mixed(2), bell_state(k)), 0.25, 1e-15);
  }
  EXPECT_THROW(fidelity(DensityOperator::maximally_mixed(1), phi), std::invalid_argument);
}

TEST(density, fidelity_matches_oracle_and_is_linear) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_density(4, rng);
    const auto b = oracle::random_density(4, rng);
    const auto psi = oracle::random_pure(4, rng);
    const auto target = PureState::normalized(oracle::to_eigen(psi));
    const auto ra = DensityOperator::from_matrix(oracle::to_eigen(a));
    const auto rb = DensityOperator::from_matrix(oracle::to_eigen(b));
    EXPECT_NEAR(fidelity(ra, target), oracle::expectation(a, psi), 1e-12);
    const double w[] = {0.3, 0.7};
    const DensityOperator parts[] = {ra, rb};
    EXPECT_NEAR(fidelity(DensityOperator::mixture(w, parts), target),
                0.3 * fidelity(ra, target) + 0.7 * fidelity(rb, target), 1e-12);
  }
}

TEST(density, diagonal_states_never_exceed_half_bell_fidelity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 1000; ++t) {
    Matrix d = Matrix::Zero(4, 4);
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (d(i, i) = u(rng)).real();
    d /= s;
    const auto rho = DensityOperator::from_matrix(d);
    for (BellKind k : kAllBellKinds) EXPECT_LE(fidelity(rho, bell_state(k)), 0.5 + 1e-15);
  }
}

TEST(density, pauli_expectations) {
  const auto phi = DensityOperator::from_pure(bell_state(BellKind::PhiPlus));
  EXPECT_NEAR(pauli_expectation(phi, PauliObservable::parse("ZZ")), 1.0, 1e-15);
  EXPECT_NEAR(pauli_expectation(phi, PauliObservable::parse("YY")), -1.0, 1e-15);
  EXPECT_NEAR(pauli_expectation(phi, PauliObservable::parse("XZ")), 0.0, 1e-15);
  EXPECT_THROW(PauliObservable::parse("XQ"), std::invalid_argument);
  EXPECT_THROW(pauli_expectation(phi, PauliObservable::parse("Z")), std::invalid_argument);

  std::mt19937_64 rng(8);
  const char labels[] = "IXYZ";
  for (int t = 0; t < 50; ++t) {
    const auto r = oracle::random_density(4, rng);
    const auto rho = DensityOperator::from_matrix(oracle::to_eigen(r));
    EXPECT_NEAR(pauli_expectation(rho, PauliObservable::parse("II")), 1.0, 1e-12);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const std::string s{labels[i], labels[j]};
        EXPECT_NEAR(pauli_expectation(rho, PauliObservable::parse(s)),
                    oracle::correlator(r, labels[i], labels[j]), 1e-12);
      }
  }
}

TEST(density, dephasing) {
  const auto phi = DensityOperator::from_pure(bell_state(BellKind::PhiPlus));
  EXPECT_LE((apply_dephasing(phi, 0, 0.0).matrix() - phi.matrix()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((apply_dephasing(phi, 1, 1.0).matrix() - rho_m().matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(apply_dephasing(phi, 0, 1.5), std::invalid_argument);
  EXPECT_THROW(apply_dephasing(phi, 0, -0.1), std::invalid_argument);
  double last = 2.0;
  for (double s = 0.0; s <= 1.0; s += 0.05) {
    const double f = fidelity(apply_dephasing(phi, 0, s), bell_state(BellKind::PhiPlus));
    EXPECT_NEAR(f, 1.0 - s / 2.0, 1e-12);
    EXPECT_LT(f, last);
    last = f;
  }
}

TEST(density, channels_preserve_validity) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 1000; ++t) {
    const auto rho = random_state(4, rng);
    expect_valid(apply_dephasing(rho, t % 2, u(rng)));
    expect_valid(depolarize(rho, u(rng)));
    expect_valid(change_local_basis(rho, t % 2, QubitBasis::y()));
    const auto m = projective_measure(rho, t % 2, QubitBasis::x());
    EXPECT_NEAR(m.probability[0] + m.probability[1], 1.0, 1e-9);
    for (const auto& post : m.post_state) {
      if (post) expect_valid(*post);
    }
  }
}

TEST(density, measurement_conditionals) {
  const auto phi = DensityOperator::from_pure(bell_state(BellKind::PhiPlus));
  const auto m = projective_measure(phi, 1, QubitBasis::z());
  EXPECT_NEAR(m.probability[0], 0.5, 1e-15);
  ASSERT_TRUE(m.post_state[0].has_value());
  EXPECT_NEAR(projective_measure(*m.post_state[0], 0, QubitBasis::z()).probability[0], 1.0, 1e-15);

  auto conditional = [](const DensityOperator& r, const QubitBasis& b, int a_out, int b_out) {
    const double joint = joint_outcome_probability(r, 1, b, a_out, 0, b, b_out);
    const double marg = projective_measure(r, 1, b).probability[a_out];
    return joint / marg;
  };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) EXPECT_NEAR(conditional(rho_m(), QubitBasis::x(), a, b), 0.5, 1e-15);
  EXPECT_NEAR(conditional(phi, QubitBasis::x(), 0, 0), 1.0, 1e-15);

  // Zero-probability branch has no post state.
  const auto up = DensityOperator::basis_state(1, 0);
  const auto mz = projective_measure(up, 0, QubitBasis::z());
  EXPECT_FALSE(mz.post_state[1].has_value());
}

TEST(density, basis_validation) {
  Vector2 a(1, 0), b(1, 1);
  EXPECT_THROW(QubitBasis::make(a, b), std::invalid_argument);
  std::mt19937_64 rng(2);
  const auto rho = random_state(4, rng);
  const auto z = change_local_basis(rho, 0, QubitBasis::z());
  EXPECT_LE((z.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  const auto y = change_local_basis(rho, 1, QubitBasis::y());
  EXPECT_LE((y.eigenvalues() - rho.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(y.matrix().trace().real(), 1.0, 1e-14);
}

TEST(density, global_phase_convention) {
  Vector v(2);
  v << Complex(0, 1), 0;
  const auto s = PureState::normalized(v);
  EXPECT_NEAR(s[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(s[0].imag(), 0.0, 1e-15);
}
