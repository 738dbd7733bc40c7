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

#ifndef QREPSIM_REPEATER_H
#define QREPSIM_REPEATER_H

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qrepsim/density.h"
#include "qrepsim/optics.h"

/// Links, chains and the operations their nodes perform on stored pairs.
///
/// A pair state is a two-qubit DensityOperator with the left node's memory as
/// qubit 1 and the right node's memory as qubit 0.
namespace qrepsim {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct NodeSpec {
  double memory_t2_s = kInfiniteTime;
  /// Recorded for completeness; dynamics use T2 only.
  std::optional<double> memory_t1_s;
  double local_op_time_s = 0.0;
  /// Depolarizing probability applied to a pair after this node swaps it.
  double swap_depolarizing = 0.0;

  /// Throws std::invalid_argument for T2 <= 0 or T1 violating 2 T1 >= T2.
  void validate() const;
};

struct LinkSpec {
  FiberChannel channel;  // total node-to-node length, station at the midpoint
  std::optional<double> source_rate_hz;
  std::optional<double> attempt_period_s;
  /// Overrides the loss-derived success probability when set.
  std::optional<double> p_success_override;
  DetectorModel detectors;
  /// Pair delivered on a herald, and the Bell state it nominally carries.
  DensityOperator pair_state = DensityOperator::from_pure(bell_state(BellKind::PsiMinus));
  BellKind pair_kind = BellKind::PsiMinus;

  /// Exactly one of source rate / attempt period must be given.
  void validate() const;
  /// Time between attempts: the source period, but never shorter than the
  /// herald round trip (photon to the midpoint, signal back).
  double attempt_period() const;
  /// (eta * 10^(-(L/2) alpha / 10))^2 unless overridden.
  double p_success() const;
  /// Time for the heralding signal to reach the nodes: L n_core / c.
  double herald_delay() const { return channel.delay_s(); }
};

/// StopOnSuccess: a link that holds a pair stops attempting until the chain
/// is consumed. ResetOnFullChain: links keep attempting every round and each
/// attempt overwrites the stored pair, so the chain only completes when every
/// link succeeds in the same round.
enum class ChainProtocol { StopOnSuccess, ResetOnFullChain };

struct ChainConfig {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  bool heralded = true;
  ChainProtocol protocol = ChainProtocol::StopOnSuccess;

  void validate() const;
};

/// q |target><target| + sum_i r_i rho_i, the output of an unheralded scheme.
struct UnheraldedMixture {
  double q = 0.0;
  DensityOperator target = DensityOperator::maximally_mixed(2);
  std::vector<double> residual_weights;
  std::vector<DensityOperator> residual_states;

  void validate() const;
  DensityOperator to_density() const;
};

/// Werner state F |b><b| + (1 - F)/3 (I - |b><b|).
DensityOperator werner_state(double fidelity_to_bell, BellKind kind = BellKind::PhiPlus);

/// Pure dephasing of one memory over `elapsed_s` with strength 1 - exp(-t/T2).
DensityOperator decay_memory(const DensityOperator& rho, int qubit, double elapsed_s,
                             double t2_s);

struct SwapBranch {
  BellKind outcome = BellKind::PhiPlus;
  double probability = 0.0;
  /// A-C state for this outcome, before any frame correction.
  std::optional<DensityOperator> rho_ac;
  /// Bell state that reference inputs would leave on A-C for this outcome.
  BellKind frame = BellKind::PhiPlus;
};

/// All four outcomes of a Bell measurement on the middle memories. The A-B
/// pair holds A as qubit 1, the B-C pair holds C as qubit 0; the result holds
/// A as qubit 1 and C as qubit 0. Reference kinds fix the Pauli frame.
std::array<SwapBranch, 4> swap_branches(const DensityOperator& rho_ab,
                                        const DensityOperator& rho_bc,
                                        BellKind ref_ab = BellKind::PhiPlus,
                                        BellKind ref_bc = BellKind::PhiPlus);

struct SwapResult {
  BellKind outcome = BellKind::PhiPlus;
  DensityOperator rho_ac = DensityOperator::maximally_mixed(2);
  BellKind frame = BellKind::PhiPlus;
};

/// Samples the Bell outcome by the Born rule.
SwapResult entanglement_swap(const DensityOperator& rho_ab, const DensityOperator& rho_bc,
                             std::mt19937_64& rng, BellKind ref_ab = BellKind::PhiPlus,
                             BellKind ref_bc = BellKind::PhiPlus);

/// Single-qubit Pauli on qubit 0 that maps Bell state `from` onto `to`.
PauliObservable::Pauli frame_correction(BellKind from, BellKind to);

/// Applies frame_correction(from, to) to qubit 0.
DensityOperator align_frame(const DensityOperator& rho, BellKind from, BellKind to);

struct PurificationResult {
  double success_probability = 0.0;
  std::optional<DensityOperator> state;
};

/// One BBPSSW round, evaluated exactly: bilateral CNOT from pair 1 onto
/// pair 2, Z measurement of both pair-2 qubits, keep pair 1 on equal
/// outcomes. Both pairs are referenced to Phi+.
PurificationResult purify_pair_exact(const DensityOperator& rho1, const DensityOperator& rho2);

/// Same round with the keep/discard decision sampled.
std::optional<DensityOperator> purify_pair(const DensityOperator& rho1,
                                           const DensityOperator& rho2, std::mt19937_64& rng);

// ------------------------------------------------------------ event log

struct SimEvent {
  enum class Kind { LinkSuccess, Decay, Swap, Delivery, Reset };
  double time_s = 0.0;
  Kind kind = Kind::LinkSuccess;
  int link = -1;
  /// Memory identity as node * 2 + side (side 0 faces left, 1 faces right).
  int memory = -1;
  /// Second memory consumed by a Swap or Delivery.
  int memory_b = -1;
  double from_s = 0.0;  // decay interval start
  double to_s = 0.0;    // decay interval end
  double value = 0.0;   // fidelity on Delivery
};

std::string_view to_string(SimEvent::Kind kind);

/// Checks that timestamps never decrease and that each memory's decay
/// intervals tile the time from its pair's creation to its consumption.
/// Returns an empty string when the log is consistent, else a description.
std::string audit_event_log(const std::vector<SimEvent>& events);

struct LatencyStats {
  double mean_s = 0.0;
  double stddev_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
};

struct TwoLinkOptions {
  bool use_memory = true;
  std::int64_t max_rounds = 1'000'000;
  bool record_events = false;
};

struct TwoLinkStats {
  std::int64_t deliveries = 0;
  std::int64_t rounds = 0;
  double elapsed_s = 0.0;
  double rate_hz = 0.0;
  double mean_fidelity = 0.0;
  LatencyStats latency;
  /// False when no pair was delivered before the horizon.
  bool resolved = false;
  std::vector<SimEvent> events;
};

/// Alice - repeater - Bob with one memory per link end. With memory each link
/// attempts every slot until it succeeds and then holds its pair (decaying)
/// until the other link succeeds; the repeater swaps after its local
/// operation time and both links restart once the swap outcome has reached
/// the end nodes. Without memory a pair is only delivered when both links
/// succeed in the same slot. Slots last max(attempt_period) over the links.
TwoLinkStats simulate_two_link_protocol(const LinkSpec& left, const LinkSpec& right,
                                        const std::array<NodeSpec, 3>& nodes,
                                        std::mt19937_64& rng, const TwoLinkOptions& opts);

struct ChainOptions {
  std::int64_t max_rounds = 1'000'000;
  bool compute_fidelity = true;
  bool record_events = false;
};

struct ChainStats {
  std::int64_t completions = 0;
  std::int64_t rounds = 0;
  double elapsed_s = 0.0;
  double rate_hz = 0.0;
  double mean_fidelity = 0.0;
  double mean_completion_rounds = 0.0;
  /// rounds-since-reset -> number of completions
  std::map<std::int64_t, std::int64_t> completion_rounds;
  bool resolved = false;
  std::vector<SimEvent> events;
};

/// Round-based chain of N nodes. Heralded: every link without a pair attempts
/// each round and stops on success; once all N-1 links hold pairs they are
/// swapped into one end-to-end pair and every link restarts. Unheralded: the
/// chain only completes when all links succeed in the same round, and the
/// delivered state is the unconditioned mixture.
ChainStats simulate_chain(const ChainConfig& cfg, std::mt19937_64& rng,
                          const ChainOptions& opts);

/// Success weight q = p^(N-1) mixture produced each round by an unheralded
/// chain; failures leave the ends maximally mixed.
UnheraldedMixture unheralded_chain_mixture(const ChainConfig& cfg);

struct CoherenceBudget {
  /// Photon flight to the midpoint plus the herald back: L n_core / c.
  double herald_round_trip_s = 0.0;
  bool propagation_ok = false;
  double propagation_margin_s = 0.0;  // T2 - round trip
  /// T_rep / p_success.
  double required_t2_for_rate_s = 0.0;
  bool rate_ok = false;
  double rate_margin_s = 0.0;  // T2 - required
  /// T2 c / (2 n_core).
  double max_fiber_length_m = 0.0;
};

CoherenceBudget check_coherence_budget(double length_km, double n_core, double t2_s,
                                       double t_rep_s, double p_success);

}  // namespace qrepsim

#endif  // QREPSIM_REPEATER_H
