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


// Acceptance checks. `acceptance N` runs criterion N; without arguments all
// ten run. Each prints one "criterion N: PASS|FAIL ..." line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qrepsim/config.h"
#include "qrepsim/density.h"
#include "qrepsim/optics.h"
#include "qrepsim/repeater.h"
#include "qrepsim/scenarios.h"
#include "qrepsim/source.h"
#include "qrepsim/tomography.h"

using namespace qrepsim;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool within_rel(double got, double want, double tol) { return std::abs(got / want - 1.0) <= tol; }

// ---------------------------------------------------------------- 1
void rate_law(Outcome& o) {
  const Config cfg = Config::from_ini_text("", {"rate_table.source_rate_hz=1e6", "rate_table.alpha_db_per_km=0.17",
                                                "rate_table.lengths_per_arm_km=10,100,200,300"});
  const auto rows = rate_table_rows(cfg);
  const double quoted[] = {460e3, 400.0, 0.1585, 6.3e-5};
  for (size_t i = 0; i < rows.size(); ++i) {
    o.detail << " L=" << rows[i].length_per_arm_km << "km:" << rows[i].rate_hz << "Hz";
    o.require(within_rel(rows[i].rate_hz, quoted[i], 0.02), "rate at " + std::to_string(rows[i].length_per_arm_km));
  }
  const double hours = rows.back().seconds_per_pair / 3600.0;
  o.detail << " hours/pair@300km=" << hours;
  o.require(within_rel(hours, 4.4, 0.02), "hours per pair");
  // The CSV path must agree with the rows.
  o.require(run_rate_table(cfg, OutputFormat::Csv).primary.find("L_per_arm_km") == 0, "csv header");
}

// ---------------------------------------------------------------- 2
void bell_decomposition(Outcome& o) {
  // |psi>_A |psi>_B with |psi> = (|up H> - |down V>)/sqrt2, memory high bit.
  const PureState psi = simon_irvine_vector();
  Vector system = Vector::Zero(16);  // index: memA memB photonA photonB
  for (int ma = 0; ma < 2; ++ma)
    for (int pa = 0; pa < 2; ++pa)
      for (int mb = 0; mb < 2; ++mb)
        for (int pb = 0; pb < 2; ++pb)
          system((ma << 3) | (mb << 2) | (pa << 1) | pb) = psi[2 * ma + pa] * psi[2 * mb + pb];
  double worst = 0.0;
  for (int m = 0; m < 4; ++m) {
    for (int p = 0; p < 4; ++p) {
      const Vector basis =
          tensor_product(bell_state(kAllBellKinds[m]), bell_state(kAllBellKinds[p])).amplitudes();
      const Complex c = basis.dot(system);
      const double want = m != p ? 0.0 : (m < 2 ? 0.5 : -0.5);
      worst = std::max(worst, std::abs(c - want));
      if (m == p) o.detail << ' ' << to_string(kAllBellKinds[m]) << "x" << to_string(kAllBellKinds[p]) << '=' << c.real();
    }
  }
  o.detail << " max_err=" << worst;
  o.require(worst <= 1e-12, "coefficients");
}

// ---------------------------------------------------------------- 3
void herald_equivalence(Outcome& o) {
  const auto ideal = ideal_spin_photon_state();
  const double analytic = two_photon_bsm(ideal, ideal).success_prob;
  o.detail << " ideal=" << analytic;
  o.require(std::abs(analytic - 0.25) <= 1e-12, "ideal 1/4");
  const double grid[] = {0.2, 0.5, 0.9};
  const int trials = 100000;
  std::mt19937_64 rng(derive_seed(3, 0));
  double worst_z = 0.0;
  for (double pa : grid) {
    for (double pb : grid) {
      int hits = 0;
      for (int i = 0; i < trials; ++i) {
        hits += herald_trial(rng, pa, pb, DetectorModel{}, SourceImperfections{}, SourceImperfections{}).heralded;
      }
      const double p = pa * pb * analytic;
      const double z = (hits - trials * p) / std::sqrt(trials * p * (1 - p));
      worst_z = std::max(worst_z, std::abs(z));
    }
  }
  o.detail << " max|z|=" << worst_z << " over 9 grid points x " << trials;
  o.require(worst_z <= 3.0, "3 sigma");
}

// ---------------------------------------------------------------- 4
LinkSpec link_with(double p) {
  LinkSpec l;
  l.source_rate_hz = 1e6;
  l.p_success_override = p;
  return l;
}

void two_link_advantage(Outcome& o) {
  const std::array<NodeSpec, 3> nodes{};
  std::uint64_t k = 0;
  for (double p : {0.01, 0.02, 0.05}) {
    const double p_l = p * p;  // end-to-end success of the memoryless scheme
    std::mt19937_64 rng(derive_seed(4, k++));
    TwoLinkOptions mem;
    mem.max_rounds = 1'000'000;
    const auto with = simulate_two_link_protocol(link_with(p), link_with(p), nodes, rng, mem);
    const double r_mem = with.rate_hz / (0.67 * 1e6 * std::sqrt(p_l));

    // 1e6 rounds hold only ~R0 p_L = 100 deliveries at p = 0.01; the 3% band
    // needs O(1e4), so the memoryless runs use 1e8 rounds.
    TwoLinkOptions none;
    none.use_memory = false;
    none.max_rounds = 100'000'000;
    const auto without = simulate_two_link_protocol(link_with(p), link_with(p), nodes, rng, none);
    const double r_none = without.rate_hz / (1e6 * p_l);
    o.detail << " p=" << p << ":mem=" << r_mem << ",memoryless=" << r_none;
    o.require(r_mem >= 0.98 && r_mem <= 1.02, "memory ratio p=" + std::to_string(p));
    o.require(r_none >= 0.97 && r_none <= 1.03, "memoryless ratio p=" + std::to_string(p));
  }
}

// ---------------------------------------------------------------- 5
ChainConfig uniform_chain(int n, double p, bool heralded) {
  ChainConfig c;
  c.nodes.assign(static_cast<size_t>(n), NodeSpec{});
  c.links.assign(static_cast<size_t>(n - 1), link_with(p));
  c.heralded = heralded;
  return c;
}

void chain_scaling(Outcome& o) {
  const double p = 0.1;
  std::vector<double> constants;
  std::uint64_t k = 0;
  ChainOptions opts;
  opts.max_rounds = 1'000'000;
  opts.compute_fidelity = false;
  for (int n : {3, 5, 9, 17}) {
    std::mt19937_64 rng(derive_seed(5, k++));
    const auto s = simulate_chain(uniform_chain(n, p, true), rng, opts);
    // rate = C R0 p / ln N
    constants.push_back(s.rate_hz * std::log(n) / (1e6 * p));
  }
  double log_sum = 0;
  for (double c : constants) log_sum += std::log(c);
  const double fit = std::exp(log_sum / constants.size());
  o.detail << " fit C=" << fit;
  int idx = 0;
  for (int n : {3, 5, 9, 17}) {
    const double dev = constants[idx++] / fit - 1.0;
    o.detail << " N=" << n << ":" << dev;
    o.require(std::abs(dev) <= 0.15, "N=" + std::to_string(n) + " off the fitted form");
  }

  std::mt19937_64 rng(derive_seed(5, 100));
  ChainOptions u;
  u.max_rounds = 1'000'000;
  const auto s = simulate_chain(uniform_chain(4, 0.5, false), rng, u);
  const double q = std::pow(0.5, 3);
  const double freq = static_cast<double>(s.completions) / u.max_rounds;
  const double z = (freq - q) / std::sqrt(q * (1 - q) / u.max_rounds);
  o.detail << " unheralded N=4: " << freq << " vs " << q << " z=" << z;
  o.require(std::abs(z) <= 3.0, "unheralded completion probability");
}

// ---------------------------------------------------------------- 6
void coherence_budget(Outcome& o) {
  const auto b = check_coherence_budget(0.0, 1.468, 3e-6, 1e-6, 1e-6);
  o.detail << " L_max=" << b.max_fiber_length_m << "m (quoted 555 m)";
  o.require(within_rel(b.max_fiber_length_m, 555.0, 0.01), "L_max; T2 c/(2n) gives " +
                                                                 std::to_string(b.max_fiber_length_m) + " m");
  o.detail << " required_T2=" << b.required_t2_for_rate_s << "s";
  o.require(std::abs(b.required_t2_for_rate_s - 1.0) <= 1e-12, "required T2");
}

// ---------------------------------------------------------------- 7
double bbpssw_closed_form(double f) {
  const double e = (1 - f) / 3;
  return (f * f + e * e) / (f * f + 2 * f * e + 5 * e * e);
}

void purification(Outcome& o) {
  auto out = [](double f) {
    const auto w = werner_state(f);
    return fidelity(*purify_pair_exact(w, w).state, bell_state(BellKind::PhiPlus));
  };
  for (double f : {0.45, 0.5, 0.55, 0.7, 0.9}) {
    const double g = out(f);
    o.detail << " " << f << "->" << g;
    o.require(std::abs(g - bbpssw_closed_form(f)) <= 1e-10, "closed form at " + std::to_string(f));
    if (f > 0.5) o.require(g > f, "gain above threshold");
    if (f == 0.5) o.require(std::abs(g - f) <= 1e-10, "fixed point");
    if (f < 0.5) o.require(g < f, "loss below threshold");
  }
}

// ---------------------------------------------------------------- 8
void tomography_round_trip(Outcome& o) {
  std::mt19937_64 rng(derive_seed(8, 0));
  std::normal_distribution<double> g;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    Matrix x(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) x(i, j) = Complex(g(rng), g(rng));
    Matrix m = x * x.adjoint();
    m /= m.trace().real();
    const auto rho = DensityOperator::from_matrix(m);
    const auto r = direct_reconstruction(exact_correlators(rho));
    worst = std::max(worst, (r.rho - m).cwiseAbs().maxCoeff());
  }
  o.detail << " direct max_err=" << worst;
  o.require(worst <= 1e-10, "direct round trip");

  const auto counts = simulate_counts(ideal_spin_photon_state(), standard_settings(), 10000, DetectorModel{}, rng);
  const auto mle = mle_reconstruction(counts);
  const double f = mle.fidelity_to(ideal_spin_photon_vector());
  o.detail << " mle_F=" << f;
  o.require(f >= 0.995, "MLE fidelity");

  // Background subtraction: removing a flat accidental level from every
  // cell drives empty cells negative, so some conditionals exceed 1.
  CountsTable bad = simulate_counts(ideal_spin_photon_state(), standard_settings(), 1000, DetectorModel{}, rng);
  for (auto& row : bad.counts)
    for (double& n : row) n -= 8.0;
  double worst_conditional = 0.0;
  for (const auto& t : conditional_probabilities(bad))
    for (const auto& g : t.given)
      if (g) worst_conditional = std::max(worst_conditional, *g);
  const auto direct = direct_reconstruction(correlators_from_counts(bad));
  o.detail << " max_conditional=" << worst_conditional << " direct_min_eig=" << direct.min_eigenvalue;
  o.require(worst_conditional > 1.0, "adversarial counts contain a conditional > 1");
  const auto fixed = mle_reconstruction(bad);
  o.detail << " mle_min_eig=" << fixed.min_eigenvalue << " mle_trace=" << fixed.trace;
  o.require(fixed.min_eigenvalue >= -kPsdTol && std::abs(fixed.trace - 1.0) <= 1e-9, "MLE physical");
}

// ---------------------------------------------------------------- 9
void bootstrap(Outcome& o) {
  const Config cfg = Config::from_ini_text("", {"tomography.preset=realistic", "tomography.bootstrap_resamples=300"});
  const auto run = tomography_from_config(cfg);
  if (!run.bootstrap) {
    o.require(false, "no bootstrap");
    return;
  }
  const auto& b = *run.bootstrap;
  o.detail << " resamples=" << b.fidelities.size() << " mean=" << b.mean << " std=" << b.stddev.value_or(-1);
  o.require(b.fidelities.size() == 300, "300 resamples");
  o.require(b.mean >= 0.89 && b.mean <= 0.95, "mean in [0.89, 0.95]");
  o.require(b.stddev && *b.stddev >= 0.01 && *b.stddev <= 0.06, "std in [0.01, 0.06]");
}

// ---------------------------------------------------------------- 10
void classical_guard(Outcome& o) {
  const double w[] = {0.5, 0.5};
  const DensityOperator parts[] = {DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 3)};
  const auto rho_m = DensityOperator::mixture(w, parts);
  for (BellKind k : kAllBellKinds) {
    const double f = fidelity(rho_m, bell_state(k));
    o.detail << ' ' << to_string(k) << '=' << f;
    o.require(f <= 0.5 + 1e-15, "fidelity to " + std::string(to_string(k)));
  }
  const auto tables = conditional_probabilities(expected_counts(rho_m, standard_settings(), 1.0, DetectorModel{}));
  double best = 0.0;
  for (size_t i = 0; i < tables.size(); ++i)
    for (size_t j = 0; j < tables.size(); ++j) {
      if (i == j) continue;
      for (int s1 : {1, -1})
        for (int s2 : {1, -1}) best = std::max(best, fidelity_lower_bound_two_bases(tables[i], s1, tables[j], s2));
    }
  o.detail << " max_two_basis_bound=" << best;
  o.require(best <= 0.5 + 1e-12, "two-basis bound certifies > 0.5");
}

struct Criterion {
  int id;
  double budget_s;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {1, 1.0, rate_law},          {2, 1.0, bell_decomposition},     {3, 30.0, herald_equivalence},
      {4, 120.0, two_link_advantage}, {5, 120.0, chain_scaling},      {6, 1.0, coherence_budget},
      {7, 1.0, purification},      {8, 120.0, tomography_round_trip}, {9, 300.0, bootstrap},
      {10, 1.0, classical_guard}};
  return c;
}

bool run_one(const Criterion& c) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.run(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs <= c.budget_s, "runtime budget " + std::to_string(c.budget_s) + " s");
  std::printf("criterion %d: %s (%.2f s)%s\n", c.id, o.pass ? "PASS" : "FAIL", secs, o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    const int id = std::atoi(argv[1]);
    for (const auto& c : criteria()) {
      if (c.id == id) return run_one(c) ? 0 : 1;
    }
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  bool all = true;
  for (const auto& c : criteria()) all = run_one(c) && all;
  return all ? 0 : 1;
}
