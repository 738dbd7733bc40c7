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

#ifndef QREPSIM_SOURCE_H
#define QREPSIM_SOURCE_H

#include <random>

#include "qrepsim/density.h"

/// Spin-photon pair sources: a charged quantum dot in a Voigt-geometry field.
///
/// Two-qubit states here are spin (x) polarization: the spin is qubit 1 and
/// the photon is qubit 0, so |up, H> is index 0 and |down, V> is index 3.
namespace qrepsim {

inline constexpr int kSpinQubit = 1;
inline constexpr int kPhotonQubit = 0;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Four-level dot parameters. Energies are informational; the photon is kept
/// as a polarization qubit with the energy label erased.
struct QDSourceModel {
  double zeeman_splitting_rad_per_s = kTwoPi / 57e-12;
  double transition_energy_ev = 1.3625;
  double trion_lifetime_s = 0.6e-9;
  double repetition_rate_hz = 1e6;

  static QDSourceModel from_larmor_period(double larmor_period_s);

  double larmor_period_s() const { return kTwoPi / zeeman_splitting_rad_per_s; }
  /// True when the repetition rate is faster than the inverse trion lifetime.
  bool exceeds_lifetime_limit() const { return repetition_rate_hz * trion_lifetime_s > 1.0; }
  /// Throws std::invalid_argument for nonpositive splitting, lifetime or rate.
  void validate() const;
};

struct SourceImperfections {
  /// Probability per attempt of one extra, uncorrelated photon.
  double g2_zero = 0.0;
  double detection_window_s = 0.0;
  double depolarizing_prob = 0.0;
  /// Probability that the dot was pumped into the intended spin state.
  double init_fidelity = 1.0;

  bool is_ideal() const {
    return g2_zero == 0.0 && detection_window_s == 0.0 && depolarizing_prob == 0.0 &&
           init_fidelity == 1.0;
  }
  void validate() const;
};

/// (i|up,H> + |down,V>)/sqrt2.
PureState ideal_spin_photon_vector();
DensityOperator ideal_spin_photon_state();

/// (i|down,H> + |up,V>)/sqrt2, emitted when pumping left the spin in the
/// wrong state and the other trion was excited.
PureState mirrored_spin_photon_vector();

/// (|up,H> - |down,V>)/sqrt2, the memory-photon state used for the two-node
/// heralding protocol.
PureState simon_irvine_vector();

/// Visibility of spin-photon coherence when the emission phase
/// delta_e * t is averaged over a uniform detection window of width T_w:
/// |sinc(delta_e T_w / 2)|.
double timing_visibility(double window_s, double zeeman_rad_per_s);

/// Initialization mixture, then timing-window dephasing, then two-qubit
/// depolarization. `rho` is a spin (x) photon state.
DensityOperator apply_source_imperfections(const DensityOperator& rho,
                                           const SourceImperfections& imp,
                                           const QDSourceModel& model);

/// Exponential emission delay with mean `lifetime_s`.
double sample_emission_time(double lifetime_s, std::mt19937_64& rng);

}  // namespace qrepsim

#endif  // QREPSIM_SOURCE_H
