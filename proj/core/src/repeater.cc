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

#include "qrepsim/repeater.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qrepsim {

namespace {

constexpr PauliObservable::Pauli kPaulis[] = {
    PauliObservable::Pauli::I, PauliObservable::Pauli::X, PauliObservable::Pauli::Y,
    PauliObservable::Pauli::Z};

BellKind identify_bell(const DensityOperator& rho) {
  for (BellKind k : kAllBellKinds) {
    if (fidelity(rho, bell_state(k)) > 0.5) return k;
  }
  throw std::logic_error("reference swap did not produce a Bell state");
}

Matrix cnot_matrix() {
  // Basis |control target>, control is the operator's qubit 1.
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

// Memory ids: node * 2 + side, side 0 faces the left neighbour.
int left_memory_of_link(int link) { return link * 2 + 1; }
int right_memory_of_link(int link) { return (link + 1) * 2; }

struct Recorder {
  bool enabled = false;
  std::vector<SimEvent>* sink = nullptr;

  void add(const SimEvent& e) const {
    if (enabled) sink->push_back(e);
  }
  void success(double t, int link) const {
    add({t, SimEvent::Kind::LinkSuccess, link, -1, -1, 0, 0, 0});
  }
  void decay(double t, int memory, double from, double to) const {
    add({t, SimEvent::Kind::Decay, -1, memory, -1, from, to, 0});
  }
  void swap(double t, int node) const {
    add({t, SimEvent::Kind::Swap, -1, node * 2, node * 2 + 1, 0, 0, 0});
  }
  void delivery(double t, int mem_a, int mem_b, double fid) const {
    add({t, SimEvent::Kind::Delivery, -1, mem_a, mem_b, 0, 0, fid});
  }
  void reset(double t) const { add({t, SimEvent::Kind::Reset, -1, -1, -1, 0, 0, 0}); }
};

// Decays both memories of a stored pair and logs the intervals.
DensityOperator age_pair(const DensityOperator& pair, int link, double from, double to,
                         double t2_left, double t2_right, const Recorder& rec) {
  DensityOperator out = decay_memory(pair, 1, to - from, t2_left);
  out = decay_memory(out, 0, to - from, t2_right);
  rec.decay(to, left_memory_of_link(link), from, to);
  rec.decay(to, right_memory_of_link(link), from, to);
  return out;
}

LatencyStats summarize(const std::vector<double>& xs) {
  LatencyStats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  s.min_s = xs.front();
  s.max_s = xs.front();
  for (double x : xs) {
    sum += x;
    s.min_s = std::min(s.min_s, x);
    s.max_s = std::max(s.max_s, x);
  }
  s.mean_s = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean_s) * (x - s.mean_s);
    s.stddev_s = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- specs

void NodeSpec::validate() const {
  if (!(memory_t2_s > 0.0)) throw std::invalid_argument("memory T2 must be positive");
  if (memory_t1_s && !(2.0 * *memory_t1_s >= memory_t2_s)) {
    throw std::invalid_argument("memory T1 must satisfy 2 T1 >= T2");
  }
  if (!(local_op_time_s >= 0.0)) throw std::invalid_argument("local op time must be nonnegative");
  if (!(swap_depolarizing >= 0.0 && swap_depolarizing <= 1.0)) {
    throw std::invalid_argument("swap depolarizing probability must lie in [0, 1]");
  }
}

void LinkSpec::validate() const {
  channel.validate();
  detectors.validate();
  if (source_rate_hz.has_value() == attempt_period_s.has_value()) {
    throw std::invalid_argument("a link needs exactly one of source rate or attempt period");
  }
  if (source_rate_hz && !(*source_rate_hz > 0.0)) {
    throw std::invalid_argument("source rate must be positive");
  }
  if (attempt_period_s && !(*attempt_period_s > 0.0)) {
    throw std::invalid_argument("attempt period must be positive");
  }
  const double p = p_success();
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("link success probability must lie in (0, 1]");
  if (pair_state.num_qubits() != 2) throw std::invalid_argument("link pair state must be two qubits");
}

double LinkSpec::attempt_period() const {
  const double source = source_rate_hz ? 1.0 / *source_rate_hz : attempt_period_s.value_or(0.0);
  return std::max(source, herald_delay());
}

double LinkSpec::p_success() const {
  if (p_success_override) return *p_success_override;
  const double arm = detectors.efficiency * transmission_probability(0.5 * channel.length_km,
                                                                     channel.attenuation_db_per_km);
  return arm * arm;
}

void ChainConfig::validate() const {
  if (nodes.size() < 2) throw std::invalid_argument("a chain needs at least two nodes");
  if (links.size() + 1 != nodes.size()) {
    throw std::invalid_argument("a chain of N nodes needs N-1 links");
  }
  for (const NodeSpec& n : nodes) n.validate();
  for (const LinkSpec& l : links) l.validate();
}

void UnheraldedMixture::validate() const {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("success weight must lie in [0, 1]");
  if (residual_weights.size() != residual_states.size()) {
    throw std::invalid_argument("one residual weight per residual state");
  }
  double total = q;
  for (double r : residual_weights) {
    if (r < 0.0) throw std::invalid_argument("residual weights must be nonnegative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must total 1");
}

DensityOperator UnheraldedMixture::to_density() const {
  validate();
  std::vector<double> w{q};
  std::vector<DensityOperator> states{target};
  w.insert(w.end(), residual_weights.begin(), residual_weights.end());
  states.insert(states.end(), residual_states.begin(), residual_states.end());
  return DensityOperator::mixture(w, states);
}

// ----------------------------------------------------------- pair algebra

DensityOperator werner_state(double f, BellKind kind) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("Werner fidelity must lie in [0, 1]");
  const DensityOperator bell = DensityOperator::from_pure(bell_state(kind));
  const Matrix& b = bell.matrix();
  const Matrix rest = Matrix::Identity(4, 4) - b;
  return DensityOperator::from_matrix(f * b + (1.0 - f) / 3.0 * rest);
}

DensityOperator decay_memory(const DensityOperator& rho, int qubit, double elapsed_s,
                             double t2_s) {
  if (!(elapsed_s >= 0.0)) throw std::invalid_argument("elapsed time must be nonnegative");
  if (!(t2_s > 0.0)) throw std::invalid_argument("T2 must be positive");
  if (elapsed_s == 0.0 || std::isinf(t2_s)) return rho;
  return apply_dephasing(rho, qubit, -std::expm1(-elapsed_s / t2_s));
}

std::array<SwapBranch, 4> swap_branches(const DensityOperator& rho_ab,
                                        const DensityOperator& rho_bc, BellKind ref_ab,
                                        BellKind ref_bc) {
  if (rho_ab.num_qubits() != 2 || rho_bc.num_qubits() != 2) {
    throw std::invalid_argument("entanglement swap expects two pairs");
  }
  // Joint register: C = 0, B2 = 1, B1 = 2, A = 3.
  const DensityOperator joint = tensor_product(rho_ab, rho_bc);
  const DensityOperator reference =
      tensor_product(DensityOperator::from_pure(bell_state(ref_ab)),
                     DensityOperator::from_pure(bell_state(ref_bc)));
  const int middle[] = {1, 2};  // Bell label written |B1 B2>

  std::array<SwapBranch, 4> out;
  for (size_t i = 0; i < kAllBellKinds.size(); ++i) {
    const BellKind k = kAllBellKinds[i];
    const PureState target = bell_state(k);
    const Projection proj = project_and_discard(joint, middle, target);
    const Projection ref = project_and_discard(reference, middle, target);
    out[i].outcome = k;
    out[i].probability = proj.probability;
    out[i].rho_ac = proj.remainder;
    out[i].frame = identify_bell(*ref.remainder);
  }
  return out;
}

SwapResult entanglement_swap(const DensityOperator& rho_ab, const DensityOperator& rho_bc,
                             std::mt19937_64& rng, BellKind ref_ab, BellKind ref_bc) {
  const std::array<SwapBranch, 4> branches = swap_branches(rho_ab, rho_bc, ref_ab, ref_bc);
  std::array<double, 4> weights{};
  for (size_t i = 0; i < 4; ++i) weights[i] = branches[i].probability;
  std::discrete_distribution<size_t> pick(weights.begin(), weights.end());
  const SwapBranch& b = branches[pick(rng)];
  return SwapResult{b.outcome, *b.rho_ac, b.frame};
}

PauliObservable::Pauli frame_correction(BellKind from, BellKind to) {
  const Vector src = bell_state(from).amplitudes();
  const Vector dst = bell_state(to).amplitudes();
  const int q0[] = {0};
  for (PauliObservable::Pauli p : kPaulis) {
    const Matrix u = embed_operator(pauli_matrix(p), q0, 2);
    if (std::abs(dst.dot(u * src)) > 1.0 - 1e-9) return p;
  }
  throw std::logic_error("no single-qubit Pauli relates the two Bell states");
}

DensityOperator align_frame(const DensityOperator& rho, BellKind from, BellKind to) {
  const PauliObservable::Pauli p = frame_correction(from, to);
  if (p == PauliObservable::Pauli::I) return rho;
  const int q0[] = {0};
  return apply_unitary(rho, pauli_matrix(p), q0);
}

PurificationResult purify_pair_exact(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.num_qubits() != 2 || rho2.num_qubits() != 2) {
    throw std::invalid_argument("purification expects two pairs");
  }
  // Joint register: B2 = 0, A2 = 1, B1 = 2, A1 = 3.
  DensityOperator joint = tensor_product(rho1, rho2);
  const Matrix cnot = cnot_matrix();
  const int alice[] = {1, 3};  // target A2, control A1
  const int bob[] = {0, 2};    // target B2, control B1
  joint = apply_unitary(joint, cnot, alice);
  joint = apply_unitary(joint, cnot, bob);

  const int target_pair[] = {0, 1};
  const Projection both_zero = project_and_discard(joint, target_pair, PureState::basis(2, 0));
  const Projection both_one = project_and_discard(joint, target_pair, PureState::basis(2, 3));

  PurificationResult out;
  out.success_probability = both_zero.probability + both_one.probability;
  if (out.success_probability > 1e-15) {
    Matrix m = Matrix::Zero(4, 4);
    if (both_zero.remainder) m += both_zero.probability * both_zero.remainder->matrix();
    if (both_one.remainder) m += both_one.probability * both_one.remainder->matrix();
    out.state = DensityOperator::hermitian_unit_trace(m / out.success_probability);
  }
  return out;
}

std::optional<DensityOperator> purify_pair(const DensityOperator& rho1,
                                           const DensityOperator& rho2, std::mt19937_64& rng) {
  PurificationResult r = purify_pair_exact(rho1, rho2);
  std::bernoulli_distribution keep(std::clamp(r.success_probability, 0.0, 1.0));
  if (!keep(rng)) return std::nullopt;
  return r.state;
}

// -------------------------------------------------------------- event log

std::string_view to_string(SimEvent::Kind kind) {
  switch (kind) {
    case SimEvent::Kind::LinkSuccess: return "link_success";
    case SimEvent::Kind::Decay: return "decay";
    case SimEvent::Kind::Swap: return "swap";
    case SimEvent::Kind::Delivery: return "delivery";
    case SimEvent::Kind::Reset: return "reset";
  }
  return "?";
}

std::string audit_event_log(const std::vector<SimEvent>& events) {
  std::map<int, double> open;  // memory -> time up to which decay has been applied
  double last_time = -kInfiniteTime;
  std::ostringstream err;

  auto consume = [&](int memory, double t, size_t i) {
    auto it = open.find(memory);
    if (it == open.end()) {
      err << "event " << i << ": memory " << memory << " consumed without a pair";
      return false;
    }
    if (std::abs(it->second - t) > 1e-15 * std::max(1.0, std::abs(t))) {
      err << "event " << i << ": memory " << memory << " consumed at " << t
          << " but decayed only up to " << it->second;
      return false;
    }
    open.erase(it);
    return true;
  };

  for (size_t i = 0; i < events.size(); ++i) {
    const SimEvent& e = events[i];
    if (e.time_s < last_time) {
      err << "event " << i << ": time " << e.time_s << " precedes " << last_time;
      return err.str();
    }
    last_time = e.time_s;
    switch (e.kind) {
      case SimEvent::Kind::LinkSuccess:
        for (int m : {left_memory_of_link(e.link), right_memory_of_link(e.link)}) {
          if (open.count(m)) {
            err << "event " << i << ": memory " << m << " overwritten while holding a pair";
            return err.str();
          }
          open[m] = e.time_s;
        }
        break;
      case SimEvent::Kind::Decay: {
        auto it = open.find(e.memory);
        if (it == open.end()) {
          err << "event " << i << ": decay on idle memory " << e.memory;
          return err.str();
        }
        if (e.from_s != it->second || e.to_s < e.from_s || e.to_s != e.time_s) {
          err << "event " << i << ": decay interval [" << e.from_s << ", " << e.to_s
              << "] does not continue from " << it->second;
          return err.str();
        }
        it->second = e.to_s;
        break;
      }
      case SimEvent::Kind::Swap:
        if (!consume(e.memory, e.time_s, i) || !consume(e.memory_b, e.time_s, i)) {
          return err.str();
        }
        break;
      case SimEvent::Kind::Delivery:
        if (!consume(e.memory, e.time_s, i) || !consume(e.memory_b, e.time_s, i)) {
          return err.str();
        }
        break;
      case SimEvent::Kind::Reset:
        if (!open.empty()) {
          err << "event " << i << ": reset with " << open.size() << " memories still holding";
          return err.str();
        }
        break;
    }
  }
  return {};
}

// --------------------------------------------------------- two-link protocol

TwoLinkStats simulate_two_link_protocol(const LinkSpec& left, const LinkSpec& right,
                                        const std::array<NodeSpec, 3>& nodes,
                                        std::mt19937_64& rng, const TwoLinkOptions& opts) {
  left.validate();
  right.validate();
  for (const NodeSpec& n : nodes) n.validate();
  if (opts.max_rounds <= 0) throw std::invalid_argument("max_rounds must be positive");

  const std::array<const LinkSpec*, 2> links = {&left, &right};
  const double slot = std::max(left.attempt_period(), right.attempt_period());
  const double notify = std::max(left.herald_delay(), right.herald_delay());
  const NodeSpec& repeater = nodes[1];
  std::array<std::bernoulli_distribution, 2> attempt = {
      std::bernoulli_distribution(left.p_success()),
      std::bernoulli_distribution(right.p_success())};

  TwoLinkStats stats;
  Recorder rec{opts.record_events, &stats.events};
  std::vector<double> latencies;
  double fidelity_sum = 0.0;

  std::array<bool, 2> holding = {false, false};
  std::array<double, 2> held_since = {0.0, 0.0};
  double cycle_start = 0.0;
  double blocked_until = 0.0;

  auto deliver = [&](double t_ready, const std::array<DensityOperator, 2>& pairs) {
    const double swap_time = t_ready + repeater.local_op_time_s;
    std::array<DensityOperator, 2> aged = pairs;
    for (int i = 0; i < 2; ++i) {
      aged[i] = age_pair(pairs[i], i, held_since[i], swap_time, nodes[i].memory_t2_s,
                         nodes[i + 1].memory_t2_s, rec);
    }
    rec.swap(swap_time, 1);
    SwapResult sw = entanglement_swap(aged[0], aged[1], rng, left.pair_kind, right.pair_kind);
    DensityOperator ac = sw.rho_ac;
    if (repeater.swap_depolarizing > 0.0) ac = depolarize(ac, repeater.swap_depolarizing);
    // The Bell outcome travels to the end nodes while their memories wait.
    const double done = swap_time + notify;
    ac = decay_memory(ac, 1, done - swap_time, nodes[0].memory_t2_s);
    ac = decay_memory(ac, 0, done - swap_time, nodes[2].memory_t2_s);
    rec.add({done, SimEvent::Kind::Decay, -1, left_memory_of_link(0), -1, swap_time, done, 0});
    rec.add({done, SimEvent::Kind::Decay, -1, right_memory_of_link(1), -1, swap_time, done, 0});
    const double f = fidelity(ac, bell_state(sw.frame));
    rec.delivery(done, left_memory_of_link(0), right_memory_of_link(1), f);
    rec.reset(done);
    fidelity_sum += f;
    latencies.push_back(done - cycle_start);
    ++stats.deliveries;
    return done;
  };

  for (std::int64_t r = 0; r < opts.max_rounds; ++r) {
    const double start = static_cast<double>(r) * slot;
    const double t = start + slot;
    if (start < blocked_until) continue;

    if (!opts.use_memory) {
      const bool a = attempt[0](rng);
      const bool b = attempt[1](rng);
      if (!(a && b)) continue;
      held_since = {t, t};
      rec.success(t, 0);
      rec.success(t, 1);
      cycle_start = start;
      deliver(t, {left.pair_state, right.pair_state});
      continue;
    }

    for (int i = 0; i < 2; ++i) {
      if (holding[i]) continue;
      if (attempt[i](rng)) {
        holding[i] = true;
        held_since[i] = t;
        rec.success(t, i);
      }
    }
    if (holding[0] && holding[1]) {
      const double done = deliver(t, {links[0]->pair_state, links[1]->pair_state});
      holding = {false, false};
      blocked_until = done;
      // The next cycle begins at the first slot boundary after the reset.
      cycle_start = std::ceil(done / slot - 1e-12) * slot;
    }
  }

  stats.rounds = opts.max_rounds;
  stats.elapsed_s = static_cast<double>(opts.max_rounds) * slot;
  stats.rate_hz = static_cast<double>(stats.deliveries) / stats.elapsed_s;
  stats.resolved = stats.deliveries > 0;
  if (stats.deliveries > 0) {
    stats.mean_fidelity = fidelity_sum / static_cast<double>(stats.deliveries);
  }
  stats.latency = summarize(latencies);
  return stats;
}

// ------------------------------------------------------------------ chains

UnheraldedMixture unheralded_chain_mixture(const ChainConfig& cfg) {
  cfg.validate();
  UnheraldedMixture mix;
  mix.q = 1.0;
  for (const LinkSpec& l : cfg.links) mix.q *= l.p_success();
  // Ideal end-to-end state in its own frame.
  mix.target = DensityOperator::from_pure(bell_state(BellKind::PhiPlus));
  mix.residual_weights = {1.0 - mix.q};
  mix.residual_states = {DensityOperator::maximally_mixed(2)};
  return mix;
}

ChainStats simulate_chain(const ChainConfig& cfg, std::mt19937_64& rng,
                          const ChainOptions& opts) {
  cfg.validate();
  if (opts.max_rounds <= 0) throw std::invalid_argument("max_rounds must be positive");
  const size_t n_links = cfg.links.size();
  double slot = 0.0;
  for (const LinkSpec& l : cfg.links) slot = std::max(slot, l.attempt_period());

  std::vector<std::bernoulli_distribution> attempt;
  double all_succeed = 1.0;
  for (const LinkSpec& l : cfg.links) {
    attempt.emplace_back(l.p_success());
    all_succeed *= l.p_success();
  }

  ChainStats stats;
  Recorder rec{opts.record_events, &stats.events};
  std::vector<char> holding(n_links, 0);
  std::vector<double> held_since(n_links, 0.0);
  std::int64_t reset_round = 0;
  double fidelity_sum = 0.0;
  double completion_rounds_sum = 0.0;

  // Unheralded delivery is the unconditioned mixture, identical every round.
  double unheralded_fidelity = 0.0;
  if (!cfg.heralded && opts.compute_fidelity) {
    unheralded_fidelity =
        fidelity(unheralded_chain_mixture(cfg).to_density(), bell_state(BellKind::PhiPlus));
  }

  auto collapse_chain = [&](double t) {
    std::vector<DensityOperator> pairs;
    pairs.reserve(n_links);
    for (size_t i = 0; i < n_links; ++i) {
      pairs.push_back(age_pair(cfg.links[i].pair_state, static_cast<int>(i), held_since[i], t,
                               cfg.nodes[i].memory_t2_s, cfg.nodes[i + 1].memory_t2_s, rec));
    }
    DensityOperator acc = pairs[0];
    BellKind frame = cfg.links[0].pair_kind;
    for (size_t i = 1; i < n_links; ++i) {
      rec.swap(t, static_cast<int>(i));
      SwapResult sw = entanglement_swap(acc, pairs[i], rng, frame, cfg.links[i].pair_kind);
      acc = sw.rho_ac;
      frame = sw.frame;
      if (cfg.nodes[i].swap_depolarizing > 0.0) acc = depolarize(acc, cfg.nodes[i].swap_depolarizing);
    }
    return fidelity(acc, bell_state(frame));
  };

  // Event-log entries for a completion whose state is not evolved.
  auto log_bookkeeping = [&](double t) {
    for (size_t i = 0; i < n_links; ++i) {
      rec.decay(t, left_memory_of_link(static_cast<int>(i)), held_since[i], t);
      rec.decay(t, right_memory_of_link(static_cast<int>(i)), held_since[i], t);
    }
    for (size_t i = 1; i < n_links; ++i) rec.swap(t, static_cast<int>(i));
  };

  for (std::int64_t r = 0; r < opts.max_rounds; ++r) {
    const double t = static_cast<double>(r + 1) * slot;
    bool complete = true;

    if (cfg.heralded && cfg.protocol == ChainProtocol::StopOnSuccess) {
      for (size_t i = 0; i < n_links; ++i) {
        if (!holding[i] && attempt[i](rng)) {
          holding[i] = 1;
          held_since[i] = t;
          rec.success(t, static_cast<int>(i));
        }
        complete = complete && holding[i];
      }
    } else {
      // Every link attempts; only a full same-round success completes.
      for (size_t i = 0; i < n_links; ++i) {
        const bool ok = attempt[i](rng);
        complete = complete && ok;
      }
      if (complete) {
        for (size_t i = 0; i < n_links; ++i) {
          held_since[i] = t;
          rec.success(t, static_cast<int>(i));
        }
      }
    }
    if (!complete) continue;

    const std::int64_t rounds = r + 1 - reset_round;
    ++stats.completions;
    ++stats.completion_rounds[rounds];
    completion_rounds_sum += static_cast<double>(rounds);
    double f = 0.0;
    if (cfg.heralded && opts.compute_fidelity) {
      f = collapse_chain(t);
    } else {
      if (!cfg.heralded) f = unheralded_fidelity;
      if (rec.enabled) log_bookkeeping(t);
    }
    fidelity_sum += f;
    rec.delivery(t, left_memory_of_link(0), right_memory_of_link(static_cast<int>(n_links) - 1), f);
    rec.reset(t);
    std::fill(holding.begin(), holding.end(), 0);
    reset_round = r + 1;
  }

  stats.rounds = opts.max_rounds;
  stats.elapsed_s = static_cast<double>(opts.max_rounds) * slot;
  stats.rate_hz = static_cast<double>(stats.completions) / stats.elapsed_s;
  if (stats.completions > 0) {
    stats.mean_fidelity = fidelity_sum / static_cast<double>(stats.completions);
    stats.mean_completion_rounds = completion_rounds_sum / static_cast<double>(stats.completions);
  }
  const bool same_round_only = !cfg.heralded || cfg.protocol == ChainProtocol::ResetOnFullChain;
  stats.resolved = stats.completions > 0 &&
                   !(same_round_only && all_succeed < 1.0 / static_cast<double>(opts.max_rounds));
  return stats;
}

// -------------------------------------------------------- coherence budget

CoherenceBudget check_coherence_budget(double length_km, double n_core, double t2_s,
                                       double t_rep_s, double p_success) {
  if (!(n_core >= 1.0) || !(t2_s > 0.0) || !(t_rep_s > 0.0) ||
      !(p_success > 0.0 && p_success <= 1.0) || !(length_km >= 0.0)) {
    throw std::invalid_argument("coherence budget inputs out of range");
  }
  CoherenceBudget b;
  b.herald_round_trip_s = propagation_delay(length_km, n_core);
  b.propagation_margin_s = t2_s - b.herald_round_trip_s;
  b.propagation_ok = length_km == 0.0 || b.propagation_margin_s > 0.0;
  b.required_t2_for_rate_s = t_rep_s / p_success;
  b.rate_margin_s = t2_s - b.required_t2_for_rate_s;
  b.rate_ok = b.rate_margin_s >= 0.0;
  b.max_fiber_length_m = t2_s * kSpeedOfLight / (2.0 * n_core);
  return b;
}

}  // namespace qrepsim
