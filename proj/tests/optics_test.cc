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


#include "qrepsim/optics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.h"

using namespace qrepsim;

namespace {

// Bell measurement of photons {0, 2} on kron(a, b), done with loops.
struct OracleBsm {
  double probability;
  oracle::Mat memories;  // memory A high, memory B low
};

OracleBsm oracle_bsm(const oracle::Mat& a, const oracle::Mat& b, const oracle::Vec& photon_bell) {
  const oracle::Mat joint = oracle::kron(a, b);
  oracle::Mat p(16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const bool rest = ((i >> 1) & 1) == ((j >> 1) & 1) && ((i >> 3) & 1) == ((j >> 3) & 1);
      if (!rest) continue;
      const int pi = (((i >> 2) & 1) << 1) | (i & 1);
      const int pj = (((j >> 2) & 1) << 1) | (j & 1);
      p(i, j) = photon_bell[pi] * std::conj(photon_bell[pj]);
    }
  const oracle::Mat projected = oracle::mul(oracle::mul(p, joint), p);
  const double prob = oracle::trace(projected).real();
  oracle::Mat mem = oracle::partial_trace_keep(projected, 4, {1, 3});
  for (auto& v : mem.a) v /= prob;
  return {prob, mem};
}

}  // namespace

TEST(optics, transmission_and_delay) {
  EXPECT_NEAR(transmission_probability(10.0, 0.17), oracle::transmission(10.0, 0.17), 1e-15);
  EXPECT_NEAR(transmission_probability(0.0, 0.17), 1.0, 0.0);
  EXPECT_NEAR(transmission_probability(100.0, 0.17), std::pow(10.0, -1.7), 1e-15);
  EXPECT_NEAR(propagation_delay(1.0, 1.468), 1e3 * 1.468 / 299792458.0, 1e-18);
  EXPECT_THROW(transmission_probability(-1.0, 0.17), std::invalid_argument);
  EXPECT_THROW(propagation_delay(1.0, 0.9), std::invalid_argument);
  FiberChannel f{25.0, 0.17, 1.468};
  EXPECT_NEAR(f.transmission(), oracle::transmission(25.0, 0.17), 1e-15);
  EXPECT_EQ(fiber_attenuation_presets().at(1550), 0.17);
  EXPECT_EQ(fiber_attenuation_presets().at(850), 3.5);
}

TEST(optics, link_rate_values) {
  const DetectorModel det;
  const double expected[][2] = {{0.0, 1e6}, {20.0, 1e6 * std::pow(10.0, -0.34)},
                                {200.0, 1e6 * std::pow(10.0, -3.4)}};
  for (const auto& e : expected) {
    EXPECT_NEAR(link_entanglement_rate(1e6, e[0], 0.17, det) / e[1], 1.0, 1e-12);
  }
  DetectorModel half;
  half.efficiency = 0.5;
  EXPECT_NEAR(link_entanglement_rate(1e6, 0.0, 0.17, half), 0.25e6, 1e-6);
  EXPECT_THROW(link_entanglement_rate(0.0, 1.0, 0.17, det), std::invalid_argument);
}

TEST(optics, rate_doubles_with_source_rate) {
  const DetectorModel det;
  for (double l : {0.0, 50.0, 400.0}) {
    EXPECT_NEAR(link_entanglement_rate(2e6, l, 0.17, det) / link_entanglement_rate(1e6, l, 0.17, det),
                2.0, 1e-12);
  }
}

TEST(optics, ideal_bsm_gives_psi_minus_with_quarter_probability) {
  const auto r = two_photon_bsm(ideal_spin_photon_state(), ideal_spin_photon_state());
  EXPECT_NEAR(r.success_prob, 0.25, 1e-12);
  ASSERT_TRUE(r.memory_state.has_value());
  EXPECT_NEAR(fidelity(*r.memory_state, bell_state(BellKind::PsiMinus)), 1.0, 1e-12);
}

TEST(optics, bsm_matches_loop_oracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const auto a = t == 0 ? oracle::outer(oracle::spin_photon()) : oracle::random_density(4, rng);
    const auto b = t == 0 ? oracle::outer(oracle::spin_photon()) : oracle::random_density(4, rng);
    for (BellKind k : kAllBellKinds) {
      const auto got = two_photon_bsm(DensityOperator::from_matrix(oracle::to_eigen(a)),
                                      DensityOperator::from_matrix(oracle::to_eigen(b)), k);
      const auto want = oracle_bsm(a, b, oracle::bell(k));
      EXPECT_NEAR(got.success_prob, want.probability, 1e-12);
      ASSERT_TRUE(got.memory_state.has_value());
      EXPECT_LE(oracle::max_abs_diff(oracle::from_eigen(got.memory_state->matrix()), want.memories), 1e-10);
    }
  }
}

TEST(optics, bsm_outcomes_sum_to_one) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 20; ++t) {
    const auto a = DensityOperator::from_matrix(oracle::to_eigen(oracle::random_density(4, rng)));
    const auto b = DensityOperator::from_matrix(oracle::to_eigen(oracle::random_density(4, rng)));
    double s = 0;
    for (BellKind k : kAllBellKinds) s += two_photon_bsm(a, b, k).success_prob;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(optics, distinguishable_photons_lose_coherence_only) {
  const auto src = ideal_spin_photon_state();
  double last = 1.0;
  for (double v = 1.0; v >= 0.0; v -= 0.25) {
    const auto r = two_photon_bsm(src, src, BellKind::PsiMinus, v);
    EXPECT_NEAR(r.success_prob, 0.25, 1e-12);
    const double f = fidelity(*r.memory_state, bell_state(BellKind::PsiMinus));
    EXPECT_NEAR(f, 0.5 + 0.5 * v, 1e-12);
    EXPECT_LE(f, last + 1e-15);
    last = f;
  }
  EXPECT_THROW(two_photon_bsm(src, src, BellKind::PsiMinus, 1.5), std::invalid_argument);
}

TEST(optics, herald_probability_with_lossy_arms) {
  HeraldLinkModel m;
  m.p_a = 0.3;
  m.p_b = 0.6;
  m.detector.efficiency = 0.8;
  const HeraldSampler s(m);
  const double p = 0.3 * 0.8 * 0.6 * 0.8 * 0.25;
  EXPECT_NEAR(s.genuine_psi_minus_probability(), p, 1e-15);
  std::mt19937_64 rng(5);
  const int n = 400000;
  int heralds = 0;
  for (int i = 0; i < n; ++i) {
    const auto o = s.trial(rng);
    if (o.heralded) {
      ++heralds;
      EXPECT_FALSE(o.false_herald);
      EXPECT_EQ(o.announced, BellKind::PsiMinus);
    }
  }
  EXPECT_NEAR(static_cast<double>(heralds) / n, p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(optics, dark_counts_alone_give_false_heralds) {
  HeraldLinkModel m;
  m.p_a = 0.0;
  m.p_b = 0.0;
  m.detector.dark_count_prob = 0.1;
  const HeraldSampler s(m);
  std::mt19937_64 rng(6);
  const int n = 200000;
  int heralds = 0;
  for (int i = 0; i < n; ++i) {
    const auto o = s.trial(rng);
    if (o.heralded) {
      ++heralds;
      EXPECT_TRUE(o.false_herald);
      ASSERT_TRUE(o.memory_state.has_value());
      EXPECT_NEAR(fidelity(*o.memory_state, bell_state(BellKind::PsiMinus)), 0.25, 1e-12);
    }
  }
  EXPECT_NEAR(static_cast<double>(heralds) / n, 0.01, 5 * std::sqrt(0.01 * 0.99 / n));
}

TEST(optics, number_resolving_detectors_also_herald_psi_plus) {
  HeraldLinkModel m;
  m.detector.number_resolving = true;
  const HeraldSampler s(m);
  std::mt19937_64 rng(7);
  int minus = 0, plus = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto o = s.trial(rng);
    if (!o.heralded) continue;
    EXPECT_FALSE(o.false_herald);
    (o.announced == BellKind::PsiMinus ? minus : plus)++;
    EXPECT_NEAR(fidelity(*o.memory_state, bell_state(o.announced)), 1.0, 1e-12);
  }
  EXPECT_NEAR(static_cast<double>(minus) / n, 0.25, 0.01);
  EXPECT_NEAR(static_cast<double>(plus) / n, s.bsm(BellKind::PsiPlus).success_prob, 0.01);
}

TEST(optics, herald_trial_free_function) {
  std::mt19937_64 rng(9);
  int h = 0;
  for (int i = 0; i < 20000; ++i) {
    h += herald_trial(rng, 1.0, 1.0, DetectorModel{}, SourceImperfections{}, SourceImperfections{}).heralded;
  }
  EXPECT_NEAR(h / 20000.0, 0.25, 0.02);
}

TEST(optics, validation) {
  HeraldLinkModel m;
  m.p_a = 1.5;
  EXPECT_THROW(HeraldSampler{m}, std::invalid_argument);
  DetectorModel d;
  d.efficiency = -0.1;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  FiberChannel f;
  f.n_core = 0.5;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}
