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

#include "qrepsim/source.h"

#include <cmath>
#include <stdexcept>

namespace qrepsim {

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

QDSourceModel QDSourceModel::from_larmor_period(double larmor_period_s) {
  if (!(larmor_period_s > 0.0)) throw std::invalid_argument("Larmor period must be positive");
  QDSourceModel m;
  m.zeeman_splitting_rad_per_s = kTwoPi / larmor_period_s;
  return m;
}

void QDSourceModel::validate() const {
  if (!(zeeman_splitting_rad_per_s > 0.0)) {
    throw std::invalid_argument("Zeeman splitting must be positive");
  }
  if (!(trion_lifetime_s > 0.0)) throw std::invalid_argument("trion lifetime must be positive");
  if (!(repetition_rate_hz > 0.0)) throw std::invalid_argument("repetition rate must be positive");
}

void SourceImperfections::validate() const {
  if (!(g2_zero >= 0.0 && g2_zero <= 1.0)) {
    throw std::invalid_argument("g2_zero must lie in [0, 1] as a per-attempt probability");
  }
  if (!(detection_window_s >= 0.0)) {
    throw std::invalid_argument("detection window must be nonnegative");
  }
  check_unit_interval(depolarizing_prob, "depolarizing_prob");
  check_unit_interval(init_fidelity, "init_fidelity");
}

PureState ideal_spin_photon_vector() {
  Vector v = Vector::Zero(4);
  v(0) = Complex(0.0, M_SQRT1_2);  // i |up, H>
  v(3) = M_SQRT1_2;                // |down, V>
  return PureState::from_amplitudes(std::move(v));
}

DensityOperator ideal_spin_photon_state() {
  return DensityOperator::from_pure(ideal_spin_photon_vector());
}

PureState mirrored_spin_photon_vector() {
  Vector v = Vector::Zero(4);
  v(2) = Complex(0.0, M_SQRT1_2);  // i |down, H>
  v(1) = M_SQRT1_2;                // |up, V>
  return PureState::from_amplitudes(std::move(v));
}

PureState simon_irvine_vector() {
  Vector v = Vector::Zero(4);
  v(0) = M_SQRT1_2;
  v(3) = -M_SQRT1_2;
  return PureState::from_amplitudes(std::move(v));
}

double timing_visibility(double window_s, double zeeman_rad_per_s) {
  if (!(window_s >= 0.0)) throw std::invalid_argument("detection window must be nonnegative");
  const double x = 0.5 * zeeman_rad_per_s * window_s;
  if (std::abs(x) < 1e-8) return 1.0;
  return std::min(1.0, std::abs(std::sin(x) / x));
}

DensityOperator apply_source_imperfections(const DensityOperator& rho,
                                           const SourceImperfections& imp,
                                           const QDSourceModel& model) {
  imp.validate();
  if (rho.num_qubits() != 2) {
    throw std::invalid_argument("source imperfections act on a spin-photon pair");
  }
  DensityOperator out = rho;
  if (imp.init_fidelity < 1.0) {
    const DensityOperator wrong = DensityOperator::from_pure(mirrored_spin_photon_vector());
    const double w[] = {imp.init_fidelity, 1.0 - imp.init_fidelity};
    const DensityOperator parts[] = {out, wrong};
    out = DensityOperator::mixture(w, parts);
  }
  if (imp.detection_window_s > 0.0) {
    model.validate();
    const double v = timing_visibility(imp.detection_window_s, model.zeeman_splitting_rad_per_s);
    out = apply_dephasing(out, kPhotonQubit, 1.0 - v);
  }
  if (imp.depolarizing_prob > 0.0) out = depolarize(out, imp.depolarizing_prob);
  return out;
}

double sample_emission_time(double lifetime_s, std::mt19937_64& rng) {
  if (!(lifetime_s > 0.0)) throw std::invalid_argument("lifetime must be positive");
  std::exponential_distribution<double> dist(1.0 / lifetime_s);
  return dist(rng);
}

}  // namespace qrepsim
