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

#ifndef QREPSIM_OPTICS_H
#define QREPSIM_OPTICS_H

#include <map>
#include <optional>
#include <random>

#include "qrepsim/density.h"
#include "qrepsim/source.h"

namespace qrepsim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Attenuation in dB/km keyed by wavelength in nm.
const std::map<int, double>& fiber_attenuation_presets();

struct FiberChannel {
  double length_km = 0.0;
  double attenuation_db_per_km = 0.17;
  double n_core = 1.468;

  void validate() const;
  double transmission() const;
  double delay_s() const;
};

struct DetectorModel {
  double efficiency = 1.0;
  double dark_count_prob = 0.0;  // per detector per window
  bool number_resolving = false;

  void validate() const;
};

/// p = 10^(-L alpha / 10).
double transmission_probability(double length_km, double attenuation_db_per_km);

/// One-way time of flight L n_core / c.
double propagation_delay(double length_km, double n_core);

/// R0 (eta 10^(-(L_total/2) alpha / 10))^2 for a midpoint station.
double link_entanglement_rate(double source_rate_hz, double total_length_km,
                              double attenuation_db_per_km, const DetectorModel& det);

struct BsmResult {
  double success_prob = 0.0;
  /// Two-memory state, memory A as qubit 1 and memory B as qubit 0.
  std::optional<DensityOperator> memory_state;
};

/// Beamsplitter Bell-state measurement on the photons of two memory-photon
/// pairs (memory = qubit 1, photon = qubit 0 in each input). The photons are
/// projected on `photon_kind` (Psi- for the two-detector coincidence) and
/// traced out.
///
/// `indistinguishability` interpolates linearly between the coherent
/// projection (1) and the same projection with memory-memory coherence
/// erased (0).
BsmResult two_photon_bsm(const DensityOperator& source_a, const DensityOperator& source_b,
                         BellKind photon_kind = BellKind::PsiMinus,
                         double indistinguishability = 1.0);

struct HeraldOutcome {
  bool heralded = false;
  bool false_herald = false;
  /// Memory Bell state announced by the click pattern.
  BellKind announced = BellKind::PsiMinus;
  std::optional<DensityOperator> memory_state;
  double latency_s = 0.0;
};

struct HeraldLinkModel {
  DensityOperator source_a = ideal_spin_photon_state();
  DensityOperator source_b = ideal_spin_photon_state();
  double p_a = 1.0;
  double p_b = 1.0;
  DetectorModel detector;
  double g2_zero_a = 0.0;
  double g2_zero_b = 0.0;
  double indistinguishability = 1.0;
  double latency_s = 0.0;
};

/// Monte Carlo model of one heralding attempt at the midpoint station.
///
/// Per attempt: each genuine photon reaches the beamsplitter and is detected
/// with probability p * eta; each source emits an extra unpolarized photon
/// with probability g2_zero, which is detected with the same p * eta; every
/// detector fires a dark count with probability dark_count_prob. When both
/// genuine photons arrive they leave by different ports with the Psi-
/// projection probability of `two_photon_bsm` and otherwise bunch.
///
/// With threshold detectors a herald is a click in both output arms. With
/// number-resolving detectors the station heralds exactly one photon per arm
/// (Psi-) or two orthogonally polarized photons in one arm (Psi+), and
/// rejects every pattern with more than two photons.
class HeraldSampler {
 public:
  explicit HeraldSampler(HeraldLinkModel model);

  HeraldOutcome trial(std::mt19937_64& rng) const;

  const HeraldLinkModel& model() const { return model_; }
  /// Probability that both genuine photons are detected in the Psi- pattern.
  double genuine_psi_minus_probability() const;
  const BsmResult& bsm(BellKind photon_kind) const;

 private:
  HeraldLinkModel model_;
  BsmResult psi_minus_;
  BsmResult psi_plus_;
  DensityOperator uncorrelated_memories_;
};

/// Convenience wrapper around HeraldSampler built from ideal dot sources with
/// the given imperfections. Prefer a long-lived HeraldSampler in loops.
HeraldOutcome herald_trial(std::mt19937_64& rng, double p_a, double p_b,
                           const DetectorModel& det, const SourceImperfections& imp_a,
                           const SourceImperfections& imp_b,
                           const QDSourceModel& model = QDSourceModel{});

}  // namespace qrepsim

#endif  // QREPSIM_OPTICS_H
