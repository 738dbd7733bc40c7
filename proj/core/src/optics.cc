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

#include <cmath>
#include <stdexcept>

namespace qrepsim {

const std::map<int, double>& fiber_attenuation_presets() {
  static const std::map<int, double> presets = {{850, 3.5}, {1550, 0.17}};
  return presets;
}

void FiberChannel::validate() const {
  if (!(length_km >= 0.0)) throw std::invalid_argument("fiber length must be nonnegative");
  if (!(attenuation_db_per_km >= 0.0)) {
    throw std::invalid_argument("fiber attenuation must be nonnegative");
  }
  if (!(n_core >= 1.0)) throw std::invalid_argument("core index must be at least 1");
}

double FiberChannel::transmission() const {
  return transmission_probability(length_km, attenuation_db_per_km);
}

double FiberChannel::delay_s() const { return propagation_delay(length_km, n_core); }

void DetectorModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("detector efficiency must lie in [0, 1]");
  }
  if (!(dark_count_prob >= 0.0 && dark_count_prob <= 1.0)) {
    throw std::invalid_argument("dark count probability must lie in [0, 1]");
  }
}

double transmission_probability(double length_km, double attenuation_db_per_km) {
  if (!(length_km >= 0.0) || !(attenuation_db_per_km >= 0.0)) {
    throw std::invalid_argument("length and attenuation must be nonnegative");
  }
  return std::pow(10.0, -length_km * attenuation_db_per_km / 10.0);
}

double propagation_delay(double length_km, double n_core) {
  if (!(length_km >= 0.0)) throw std::invalid_argument("length must be nonnegative");
  if (!(n_core >= 1.0)) throw std::invalid_argument("core index must be at least 1");
  return length_km * 1e3 * n_core / kSpeedOfLight;
}

double link_entanglement_rate(double source_rate_hz, double total_length_km,
                              double attenuation_db_per_km, const DetectorModel& det) {
  det.validate();
  if (!(source_rate_hz > 0.0)) throw std::invalid_argument("source rate must be positive");
  const double arm =
      det.efficiency * transmission_probability(0.5 * total_length_km, attenuation_db_per_km);
  return source_rate_hz * arm * arm;
}

BsmResult two_photon_bsm(const DensityOperator& source_a, const DensityOperator& source_b,
                         BellKind photon_kind, double indistinguishability) {
  if (source_a.num_qubits() != 2 || source_b.num_qubits() != 2) {
    throw std::invalid_argument("two_photon_bsm expects two memory-photon pairs");
  }
  if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0)) {
    throw std::invalid_argument("indistinguishability must lie in [0, 1]");
  }
  // Joint register: photon B = 0, memory B = 1, photon A = 2, memory A = 3.
  const DensityOperator joint = tensor_product(source_a, source_b);
  const int photons[] = {0, 2};  // Bell label written |photon A, photon B>
  const Projection proj = project_and_discard(joint, photons, bell_state(photon_kind));

  BsmResult out;
  out.success_prob = proj.probability;
  if (proj.remainder) {
    DensityOperator mem = *proj.remainder;
    if (indistinguishability < 1.0) {
      const DensityOperator erased = apply_dephasing(mem, 0, 1.0);
      const double w[] = {indistinguishability, 1.0 - indistinguishability};
      const DensityOperator parts[] = {mem, erased};
      mem = DensityOperator::mixture(w, parts);
    }
    out.memory_state = std::move(mem);
  }
  return out;
}

// ------------------------------------------------------------ HeraldSampler

HeraldSampler::HeraldSampler(HeraldLinkModel model)
    : model_(std::move(model)),
      psi_minus_(two_photon_bsm(model_.source_a, model_.source_b, BellKind::PsiMinus,
                                model_.indistinguishability)),
      psi_plus_(two_photon_bsm(model_.source_a, model_.source_b, BellKind::PsiPlus,
                               model_.indistinguishability)),
      uncorrelated_memories_(DensityOperator::maximally_mixed(2)) {
  model_.detector.validate();
  for (double p : {model_.p_a, model_.p_b, model_.g2_zero_a, model_.g2_zero_b}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  const int memory[] = {kSpinQubit};
  uncorrelated_memories_ = tensor_product(partial_trace(model_.source_a, memory),
                                          partial_trace(model_.source_b, memory));
}

double HeraldSampler::genuine_psi_minus_probability() const {
  const double eta = model_.detector.efficiency;
  return model_.p_a * eta * model_.p_b * eta * psi_minus_.success_prob;
}

const BsmResult& HeraldSampler::bsm(BellKind photon_kind) const {
  return photon_kind == BellKind::PsiPlus ? psi_plus_ : psi_minus_;
}

HeraldOutcome HeraldSampler::trial(std::mt19937_64& rng) const {
  enum class Genuine { None, PsiMinus, PsiPlus, Bunched };

  const DetectorModel& det = model_.detector;
  std::bernoulli_distribution arrive_a(model_.p_a * det.efficiency);
  std::bernoulli_distribution arrive_b(model_.p_b * det.efficiency);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int counts[2] = {0, 0};
  Genuine genuine = Genuine::None;
  int extra_photons = 0;

  const bool a = arrive_a(rng);
  const bool b = arrive_b(rng);
  if (a && b) {
    const double u = unit(rng);
    if (u < psi_minus_.success_prob) {
      genuine = Genuine::PsiMinus;
      ++counts[0];
      ++counts[1];
    } else {
      genuine = u < psi_minus_.success_prob + psi_plus_.success_prob ? Genuine::PsiPlus
                                                                      : Genuine::Bunched;
      counts[coin(rng) ? 1 : 0] += 2;
    }
  } else if (a || b) {
    ++counts[coin(rng) ? 1 : 0];
  }

  if (model_.g2_zero_a > 0.0 && std::bernoulli_distribution(model_.g2_zero_a)(rng) &&
      arrive_a(rng)) {
    ++counts[coin(rng) ? 1 : 0];
    ++extra_photons;
  }
  if (model_.g2_zero_b > 0.0 && std::bernoulli_distribution(model_.g2_zero_b)(rng) &&
      arrive_b(rng)) {
    ++counts[coin(rng) ? 1 : 0];
    ++extra_photons;
  }
  if (det.dark_count_prob > 0.0) {
    std::bernoulli_distribution dark(det.dark_count_prob);
    for (int arm = 0; arm < 2; ++arm) {
      if (dark(rng)) ++counts[arm];
    }
  }

  HeraldOutcome out;
  out.latency_s = model_.latency_s;
  bool genuine_herald = false;
  if (!det.number_resolving) {
    out.heralded = counts[0] > 0 && counts[1] > 0;
    out.announced = BellKind::PsiMinus;
    // Dark counts on arms the pair already fired do not change the pattern.
    genuine_herald = genuine == Genuine::PsiMinus && extra_photons == 0;
  } else {
    const int total = counts[0] + counts[1];
    if (total == 2 && counts[0] == 1) {
      out.heralded = true;
      out.announced = BellKind::PsiMinus;
      genuine_herald = genuine == Genuine::PsiMinus;
    } else if (total == 2) {
      out.announced = BellKind::PsiPlus;
      if (genuine == Genuine::PsiPlus) {
        out.heralded = true;
        genuine_herald = true;
      } else if (genuine == Genuine::None) {
        // Two unrelated photons in one arm are orthogonally polarized half the time.
        out.heralded = coin(rng);
      }
    }
  }

  if (out.heralded) {
    out.false_herald = !genuine_herald;
    const std::optional<DensityOperator>& projected = bsm(out.announced).memory_state;
    out.memory_state = genuine_herald && projected ? *projected : uncorrelated_memories_;
  }
  return out;
}

HeraldOutcome herald_trial(std::mt19937_64& rng, double p_a, double p_b,
                           const DetectorModel& det, const SourceImperfections& imp_a,
                           const SourceImperfections& imp_b, const QDSourceModel& model) {
  HeraldLinkModel link;
  link.source_a = apply_source_imperfections(ideal_spin_photon_state(), imp_a, model);
  link.source_b = apply_source_imperfections(ideal_spin_photon_state(), imp_b, model);
  link.p_a = p_a;
  link.p_b = p_b;
  link.detector = det;
  link.g2_zero_a = imp_a.g2_zero;
  link.g2_zero_b = imp_b.g2_zero;
  return HeraldSampler(std::move(link)).trial(rng);
}

}  // namespace qrepsim
