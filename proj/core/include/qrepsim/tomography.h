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

#ifndef QREPSIM_TOMOGRAPHY_H
#define QREPSIM_TOMOGRAPHY_H

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qrepsim/density.h"
#include "qrepsim/optics.h"
#include "qrepsim/random.h"

/// Two-qubit state tomography of a spin (qubit 1, "a") and photon (qubit 0, "b").
namespace qrepsim {

enum class Axis { Z, X, Y };

char to_char(Axis axis);
/// Throws std::invalid_argument unless c is one of Z, X, Y.
Axis axis_from_char(char c);
QubitBasis basis_of(Axis axis);

struct BasisSetting {
  Axis a = Axis::Z;  // spin
  Axis b = Axis::Z;  // photon

  bool operator==(const BasisSetting&) const = default;
};

/// The nine settings {Z, X, Y} x {Z, X, Y}.
std::vector<BasisSetting> standard_settings();

/// Projector for outcome (a, b) of a setting; outcome 0 is the +1 eigenvector.
Matrix setting_projector(const BasisSetting& s, int outcome_a, int outcome_b);

/// Throws std::invalid_argument when the settings' projectors span fewer than
/// 16 dimensions.
void check_informationally_complete(const std::vector<BasisSetting>& settings);

/// Counts per setting, indexed by outcome 2 * outcome_a + outcome_b. Stored as
/// doubles so exact probabilities can stand in for counts. Entries may be
/// negative (background-subtracted data); likelihood-based estimators treat
/// negative entries as zero.
struct CountsTable {
  std::vector<BasisSetting> settings;
  std::vector<std::array<double, 4>> counts;

  double total(size_t setting) const;
  /// CSV with header setting_a,setting_b,outcome_a,outcome_b,count.
  std::string to_csv() const;
  static CountsTable from_csv(std::string_view text);
};

/// Born-rule outcome probabilities with a uniform dark-count background:
/// p' = (1 - d) p + d / 4.
std::array<double, 4> outcome_probabilities(const DensityOperator& rho, const BasisSetting& s,
                                            double dark_count_prob = 0.0);

CountsTable simulate_counts(const DensityOperator& rho_true,
                            const std::vector<BasisSetting>& settings,
                            std::int64_t shots_per_setting, const DetectorModel& det,
                            std::mt19937_64& rng);

/// Expected counts (probabilities times shots), no sampling.
CountsTable expected_counts(const DensityOperator& rho_true,
                            const std::vector<BasisSetting>& settings,
                            double shots_per_setting, const DetectorModel& det);

/// Pr[spin outcome a | photon outcome b] for one setting.
struct ConditionalTable {
  BasisSetting setting;
  /// Entry 2a + b; absent when photon outcome b was never seen.
  std::array<std::optional<double>, 4> given;
  /// Relative frequency of photon outcome b.
  std::array<double, 2> photon_marginal{};

  std::optional<double> pr(int a, int b) const { return given[2 * a + b]; }
};

std::vector<ConditionalTable> conditional_probabilities(const CountsTable& counts);

/// r[i][j] = <sigma_i (spin) sigma_j (photon)>, index 0..3 = I, X, Y, Z.
using Correlators = std::array<std::array<double, 4>, 4>;

/// Correlators estimated from counts. Single-qubit terms are averaged over
/// every setting that measures that axis; r[0][0] is 1.
Correlators correlators_from_counts(const CountsTable& counts);
Correlators exact_correlators(const DensityOperator& rho);

struct TomographyResult {
  std::string method;
  Matrix rho;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  /// False when the estimate has a negative eigenvalue beyond kPsdTol.
  bool physical = false;
  std::optional<double> fidelity;

  // Maximum-likelihood diagnostics.
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
  std::vector<double> log_likelihood_trace;

  /// <target|rho|target> without clamping (direct estimates may be unphysical).
  double fidelity_to(const PureState& target) const;
};

/// JSON object with the full matrix (real and imaginary parts) and diagnostics.
std::string to_json(const TomographyResult& result, int indent = 2);

/// rho = 1/4 sum r_ij sigma_i (x) sigma_j with r_II forced to 1.
TomographyResult direct_reconstruction(const Correlators& r);

struct MleOptions {
  int max_iterations = 10'000;
  /// Stop when the log-likelihood per count improves by less than this.
  double tolerance = 1e-9;
  bool record_trace = false;
};

/// Maximum-likelihood state via the diluted R rho R iteration.
TomographyResult mle_reconstruction(const CountsTable& counts, const MleOptions& opts = {});

/// Multinomial log-likelihood sum n_k log p_k (terms with n_k = 0 skipped).
double log_likelihood(const CountsTable& counts, const Matrix& rho);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::int64_t> counts;
};

Histogram make_histogram(const std::vector<double>& values, int bins);

struct BootstrapStats {
  std::vector<double> fidelities;
  double mean = 0.0;
  double median = 0.0;
  /// Absent for a single resample.
  std::optional<double> stddev;
  Histogram histogram;
};

/// Resamples every setting multinomially at its original total, fits each
/// resample by MLE and collects fidelities to `target`. Resample i uses a
/// seed derived from one draw of `rng` and i, so results do not depend on
/// `workers`.
BootstrapStats bootstrap_statistics(const CountsTable& counts, const PureState& target,
                                    int n_resamples, std::mt19937_64& rng, int workers = 1,
                                    int histogram_bins = 20, const MleOptions& opts = {});

/// Sign pattern (s_x, s_y, s_z) for fidelity = (1 + s_x xx + s_y yy + s_z zz) / 4.
std::array<int, 3> bell_correlator_signs(BellKind kind);

double fidelity_from_correlators(double xx, double yy, double zz, BellKind target);

/// Lower bound on the fidelity to a state stabilized by (sign_1 P_1) and
/// (sign_2 P_2), where P_k is the product of the Pauli axes of table k's
/// setting: F >= C_1 + C_2 - 1 with C_k the probability that the outcomes
/// agree with sign_k (equal for +1, opposite for -1). Clamped at 0.
///
/// Throws std::invalid_argument when a row of a table does not sum to 1.
double fidelity_lower_bound_two_bases(const ConditionalTable& first, int sign_first,
                                      const ConditionalTable& second, int sign_second);

}  // namespace qrepsim

#endif  // QREPSIM_TOMOGRAPHY_H
