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

#include "qrepsim/tomography.h"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qrepsim {

namespace {

using Pauli = PauliObservable::Pauli;

int pauli_index(Axis axis) {
  switch (axis) {
    case Axis::X: return 1;
    case Axis::Y: return 2;
    case Axis::Z: return 3;
  }
  return 0;
}

constexpr Pauli kPauliByIndex[] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

Matrix kron2(const Matrix2& a, const Matrix2& b) {
  Matrix out(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  }
  return out;
}

Vector2 basis_vector(Axis axis, int outcome) {
  const QubitBasis b = basis_of(axis);
  return outcome == 0 ? b.zero : b.one;
}

// Negative entries are allowed: background-subtracted data produce them.
void check_counts(const CountsTable& counts) {
  if (counts.settings.size() != counts.counts.size()) {
    throw std::invalid_argument("counts table needs one row of counts per setting");
  }
  for (const auto& row : counts.counts) {
    for (double n : row) {
      if (!std::isfinite(n)) throw std::invalid_argument("counts must be finite");
    }
  }
}

// Likelihood-based estimators give negative counts no weight.
CountsTable clipped(const CountsTable& counts) {
  check_counts(counts);
  CountsTable out = counts;
  for (auto& row : out.counts) {
    for (double& n : row) n = std::max(n, 0.0);
  }
  return out;
}

struct Dataset {
  std::vector<Matrix> projectors;
  std::vector<double> counts;
  double total = 0.0;
};

Dataset flatten(const CountsTable& counts) {
  Dataset d;
  for (size_t s = 0; s < counts.settings.size(); ++s) {
    for (int k = 0; k < 4; ++k) {
      d.projectors.push_back(setting_projector(counts.settings[s], k / 2, k % 2));
      d.counts.push_back(counts.counts[s][k]);
      d.total += counts.counts[s][k];
    }
  }
  return d;
}

double dataset_log_likelihood(const Dataset& d, const Matrix& rho) {
  double ll = 0.0;
  for (size_t k = 0; k < d.counts.size(); ++k) {
    if (d.counts[k] <= 0.0) continue;
    const double p = (d.projectors[k].cwiseProduct(rho.transpose())).sum().real();
    ll += d.counts[k] * std::log(std::max(p, 1e-300));
  }
  return ll;
}

std::array<std::int64_t, 4> multinomial(std::int64_t n, const std::array<double, 4>& p,
                                        std::mt19937_64& rng) {
  std::array<std::int64_t, 4> out{};
  double remaining = 1.0;
  for (int k = 0; k < 3; ++k) {
    if (n <= 0) break;
    const double q = remaining > 0.0 ? std::clamp(p[k] / remaining, 0.0, 1.0) : 0.0;
    out[k] = std::binomial_distribution<std::int64_t>(n, q)(rng);
    n -= out[k];
    remaining -= p[k];
  }
  out[3] = std::max<std::int64_t>(n, 0);
  return out;
}

TomographyResult finish(std::string method, Matrix rho) {
  TomographyResult r;
  r.method = std::move(method);
  r.trace = rho.trace().real();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.physical = r.min_eigenvalue >= -kPsdTol && std::abs(r.trace - 1.0) <= kTraceTol;
  r.rho = std::move(rho);
  return r;
}

}  // namespace

// ------------------------------------------------------------- settings

char to_char(Axis axis) {
  switch (axis) {
    case Axis::Z: return 'Z';
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
  }
  return '?';
}

Axis axis_from_char(char c) {
  switch (c) {
    case 'Z': case 'z': return Axis::Z;
    case 'X': case 'x': return Axis::X;
    case 'Y': case 'y': return Axis::Y;
  }
  throw std::invalid_argument(std::string("unknown measurement axis '") + c + "'");
}

QubitBasis basis_of(Axis axis) {
  switch (axis) {
    case Axis::Z: return QubitBasis::z();
    case Axis::X: return QubitBasis::x();
    case Axis::Y: return QubitBasis::y();
  }
  throw std::logic_error("bad axis");
}

std::vector<BasisSetting> standard_settings() {
  std::vector<BasisSetting> out;
  for (Axis a : {Axis::Z, Axis::X, Axis::Y}) {
    for (Axis b : {Axis::Z, Axis::X, Axis::Y}) out.push_back({a, b});
  }
  return out;
}

Matrix setting_projector(const BasisSetting& s, int outcome_a, int outcome_b) {
  if (outcome_a < 0 || outcome_a > 1 || outcome_b < 0 || outcome_b > 1) {
    throw std::invalid_argument("outcomes are 0 or 1");
  }
  const Vector2 u = basis_vector(s.a, outcome_a);
  const Vector2 v = basis_vector(s.b, outcome_b);
  Vector psi(4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) psi(2 * i + j) = u(i) * v(j);
  }
  return psi * psi.adjoint();
}

void check_informationally_complete(const std::vector<BasisSetting>& settings) {
  if (settings.empty()) throw std::invalid_argument("no measurement settings given");
  Matrix stacked(static_cast<Eigen::Index>(settings.size() * 4), 16);
  Eigen::Index row = 0;
  for (const BasisSetting& s : settings) {
    for (int k = 0; k < 4; ++k) {
      const Matrix e = setting_projector(s, k / 2, k % 2);
      stacked.row(row++) = Eigen::Map<const Eigen::RowVectorXcd>(e.data(), 16);
    }
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
  qr.setThreshold(1e-9);
  if (qr.rank() < 16) {
    throw std::invalid_argument("measurement settings are informationally incomplete (rank " +
                                std::to_string(qr.rank()) + " < 16)");
  }
}

// --------------------------------------------------------------- counts

double CountsTable::total(size_t setting) const {
  const auto& c = counts.at(setting);
  return c[0] + c[1] + c[2] + c[3];
}

std::string CountsTable::to_csv() const {
  check_counts(*this);
  std::ostringstream out;
  out.precision(17);
  out << "setting_a,setting_b,outcome_a,outcome_b,count\n";
  for (size_t s = 0; s < settings.size(); ++s) {
    for (int k = 0; k < 4; ++k) {
      out << to_char(settings[s].a) << ',' << to_char(settings[s].b) << ',' << k / 2 << ','
          << k % 2 << ',' << counts[s][k] << '\n';
    }
  }
  return out.str();
}

CountsTable CountsTable::from_csv(std::string_view text) {
  CountsTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("setting_a", 0) == 0) continue;
    }
    std::istringstream fields(line);
    std::string a, b, oa, ob, n;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') ||
        !std::getline(fields, oa, ',') || !std::getline(fields, ob, ',') ||
        !std::getline(fields, n) || a.size() != 1 || b.size() != 1) {
      throw std::invalid_argument("malformed counts row: " + line);
    }
    const BasisSetting s{axis_from_char(a[0]), axis_from_char(b[0])};
    const int ia = std::stoi(oa);
    const int ib = std::stoi(ob);
    if (ia < 0 || ia > 1 || ib < 0 || ib > 1) throw std::invalid_argument("outcomes are 0 or 1");
    auto it = std::find(t.settings.begin(), t.settings.end(), s);
    size_t idx = static_cast<size_t>(it - t.settings.begin());
    if (it == t.settings.end()) {
      t.settings.push_back(s);
      t.counts.push_back({0, 0, 0, 0});
    }
    t.counts[idx][2 * ia + ib] += std::stod(n);
  }
  check_counts(t);
  return t;
}

std::array<double, 4> outcome_probabilities(const DensityOperator& rho, const BasisSetting& s,
                                            double dark_count_prob) {
  if (rho.num_qubits() != 2) throw std::invalid_argument("tomography expects a two-qubit state");
  if (!(dark_count_prob >= 0.0 && dark_count_prob <= 1.0)) {
    throw std::invalid_argument("dark count probability must lie in [0, 1]");
  }
  std::array<double, 4> p{};
  for (int k = 0; k < 4; ++k) {
    const double born = std::max(
        0.0, (setting_projector(s, k / 2, k % 2).cwiseProduct(rho.matrix().transpose()))
                 .sum()
                 .real());
    p[k] = (1.0 - dark_count_prob) * born + 0.25 * dark_count_prob;
  }
  const double sum = p[0] + p[1] + p[2] + p[3];
  for (double& x : p) x /= sum;
  return p;
}

CountsTable simulate_counts(const DensityOperator& rho_true,
                            const std::vector<BasisSetting>& settings,
                            std::int64_t shots_per_setting, const DetectorModel& det,
                            std::mt19937_64& rng) {
  if (shots_per_setting <= 0) throw std::invalid_argument("shots per setting must be positive");
  det.validate();
  CountsTable t;
  t.settings = settings;
  for (const BasisSetting& s : settings) {
    const auto n = multinomial(shots_per_setting,
                               outcome_probabilities(rho_true, s, det.dark_count_prob), rng);
    t.counts.push_back({static_cast<double>(n[0]), static_cast<double>(n[1]),
                        static_cast<double>(n[2]), static_cast<double>(n[3])});
  }
  return t;
}

CountsTable expected_counts(const DensityOperator& rho_true,
                            const std::vector<BasisSetting>& settings,
                            double shots_per_setting, const DetectorModel& det) {
  if (!(shots_per_setting > 0.0)) throw std::invalid_argument("shots per setting must be positive");
  det.validate();
  CountsTable t;
  t.settings = settings;
  for (const BasisSetting& s : settings) {
    auto p = outcome_probabilities(rho_true, s, det.dark_count_prob);
    for (double& x : p) x *= shots_per_setting;
    t.counts.push_back(p);
  }
  return t;
}

std::vector<ConditionalTable> conditional_probabilities(const CountsTable& counts) {
  check_counts(counts);
  std::vector<ConditionalTable> out;
  for (size_t s = 0; s < counts.settings.size(); ++s) {
    const auto& n = counts.counts[s];
    ConditionalTable c;
    c.setting = counts.settings[s];
    const double total = counts.total(s);
    for (int b = 0; b < 2; ++b) {
      const double given_b = n[b] + n[2 + b];
      c.photon_marginal[b] = total > 0.0 ? given_b / total : 0.0;
      if (given_b > 0.0) {
        c.given[b] = n[b] / given_b;
        c.given[2 + b] = n[2 + b] / given_b;
      }
    }
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------- correlators

Correlators correlators_from_counts(const CountsTable& counts) {
  check_counts(counts);
  Correlators r{};
  std::array<int, 4> n_a{}, n_b{};
  for (size_t s = 0; s < counts.settings.size(); ++s) {
    const double total = counts.total(s);
    if (total <= 0.0) continue;
    const auto& n = counts.counts[s];
    const int i = pauli_index(counts.settings[s].a);
    const int j = pauli_index(counts.settings[s].b);
    // outcome 0 <-> eigenvalue +1
    r[i][j] = (n[0] - n[1] - n[2] + n[3]) / total;
    r[i][0] += (n[0] + n[1] - n[2] - n[3]) / total;
    r[0][j] += (n[0] - n[1] + n[2] - n[3]) / total;
    ++n_a[i];
    ++n_b[j];
  }
  for (int k = 1; k < 4; ++k) {
    if (n_a[k] > 0) r[k][0] /= n_a[k];
    if (n_b[k] > 0) r[0][k] /= n_b[k];
  }
  r[0][0] = 1.0;
  return r;
}

Correlators exact_correlators(const DensityOperator& rho) {
  if (rho.num_qubits() != 2) throw std::invalid_argument("tomography expects a two-qubit state");
  Correlators r{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Matrix op = kron2(pauli_matrix(kPauliByIndex[i]), pauli_matrix(kPauliByIndex[j]));
      r[i][j] = (op.cwiseProduct(rho.matrix().transpose())).sum().real();
    }
  }
  return r;
}

// ------------------------------------------------------- reconstruction

double TomographyResult::fidelity_to(const PureState& target) const {
  if (target.dim() != rho.rows()) throw std::invalid_argument("target dimension mismatch");
  const Vector& psi = target.amplitudes();
  return psi.dot(rho * psi).real();
}

std::string to_json(const TomographyResult& result, int indent) {
  nlohmann::ordered_json j;
  j["method"] = result.method;
  nlohmann::ordered_json re = nlohmann::ordered_json::array();
  nlohmann::ordered_json im = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < result.rho.rows(); ++r) {
    nlohmann::ordered_json row_re = nlohmann::ordered_json::array();
    nlohmann::ordered_json row_im = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < result.rho.cols(); ++c) {
      row_re.push_back(result.rho(r, c).real());
      row_im.push_back(result.rho(r, c).imag());
    }
    re.push_back(row_re);
    im.push_back(row_im);
  }
  j["rho_real"] = re;
  j["rho_imag"] = im;
  j["trace"] = result.trace;
  j["min_eigenvalue"] = result.min_eigenvalue;
  j["physical"] = result.physical;
  j["fidelity"] = result.fidelity ? nlohmann::ordered_json(*result.fidelity) : nlohmann::ordered_json(nullptr);
  if (result.method == "mle") {
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["log_likelihood"] = result.log_likelihood;
  }
  return j.dump(indent);
}

TomographyResult direct_reconstruction(const Correlators& r) {
  Matrix rho = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double v = (i == 0 && j == 0) ? 1.0 : r[i][j];
      if (v == 0.0) continue;
      rho += v * kron2(pauli_matrix(kPauliByIndex[i]), pauli_matrix(kPauliByIndex[j]));
    }
  }
  return finish("direct", 0.25 * rho);
}

double log_likelihood(const CountsTable& counts, const Matrix& rho) {
  return dataset_log_likelihood(flatten(clipped(counts)), rho);
}

TomographyResult mle_reconstruction(const CountsTable& raw, const MleOptions& opts) {
  const CountsTable counts = clipped(raw);
  check_informationally_complete(counts.settings);
  const Dataset d = flatten(counts);
  if (!(d.total > 0.0)) throw std::invalid_argument("counts table is empty");

  const Matrix id = Matrix::Identity(4, 4);
  Matrix rho = 0.25 * id;
  double ll = dataset_log_likelihood(d, rho);
  double eps = 1.0;
  int it = 0;
  bool converged = false;
  std::vector<double> trace;
  if (opts.record_trace) trace.push_back(ll);

  while (it < opts.max_iterations) {
    ++it;
    Matrix r = Matrix::Zero(4, 4);
    for (size_t k = 0; k < d.counts.size(); ++k) {
      if (d.counts[k] <= 0.0) continue;
      const double p = (d.projectors[k].cwiseProduct(rho.transpose())).sum().real();
      r += (d.counts[k] / std::max(p, 1e-300)) * d.projectors[k];
    }
    r /= d.total;

    // Diluted step: shrink until the likelihood does not drop.
    bool accepted = false;
    Matrix cand;
    double ll_cand = ll;
    while (eps > 1e-14) {
      const Matrix a = (id + eps * r) / (1.0 + eps);
      cand = a * rho * a.adjoint();
      cand = 0.5 * (cand + cand.adjoint().eval());
      cand /= cand.trace().real();
      ll_cand = dataset_log_likelihood(d, cand);
      if (ll_cand >= ll) {
        accepted = true;
        break;
      }
      eps *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no ascent direction left at machine precision
      break;
    }
    const double gain = (ll_cand - ll) / d.total;
    rho = cand;
    ll = ll_cand;
    if (opts.record_trace) trace.push_back(ll);
    eps = std::min(eps * 1.5, 1e3);
    if (gain < opts.tolerance) {
      converged = true;
      break;
    }
  }

  TomographyResult res = finish("mle", rho);
  res.iterations = it;
  res.converged = converged;
  res.log_likelihood = ll;
  res.log_likelihood_trace = std::move(trace);
  return res;
}

// ------------------------------------------------------------ bootstrap

Histogram make_histogram(const std::vector<double>& values, int bins) {
  if (bins <= 0) throw std::invalid_argument("histogram needs at least one bin");
  Histogram h;
  if (values.empty()) return h;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (hi - lo < 1e-12) {
    lo -= 5e-4;
    hi += 5e-4;
  }
  const double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges.push_back(lo + i * w);
  h.edges.back() = hi;
  h.counts.assign(static_cast<size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / w);
    ++h.counts[static_cast<size_t>(std::clamp(b, 0, bins - 1))];
  }
  return h;
}

BootstrapStats bootstrap_statistics(const CountsTable& raw, const PureState& target,
                                    int n_resamples, std::mt19937_64& rng, int workers,
                                    int histogram_bins, const MleOptions& opts) {
  const CountsTable counts = clipped(raw);
  check_informationally_complete(counts.settings);
  if (n_resamples < 1) throw std::invalid_argument("need at least one resample");
  if (target.num_qubits() != 2) throw std::invalid_argument("target must be a two-qubit state");
  workers = std::max(1, std::min(workers, n_resamples));

  std::vector<std::array<double, 4>> freq;
  std::vector<std::int64_t> totals;
  for (size_t s = 0; s < counts.settings.size(); ++s) {
    const double total = counts.total(s);
    std::array<double, 4> f{0.25, 0.25, 0.25, 0.25};
    if (total > 0.0) {
      for (int k = 0; k < 4; ++k) f[k] = counts.counts[s][k] / total;
    }
    freq.push_back(f);
    totals.push_back(std::llround(total));
  }

  const std::uint64_t base = rng();
  BootstrapStats out;
  out.fidelities.assign(static_cast<size_t>(n_resamples), 0.0);

  auto run = [&](int first, int stride) {
    for (int i = first; i < n_resamples; i += stride) {
      std::mt19937_64 local(derive_seed(base, static_cast<std::uint64_t>(i)));
      CountsTable sample;
      sample.settings = counts.settings;
      for (size_t s = 0; s < freq.size(); ++s) {
        const auto n = multinomial(totals[s], freq[s], local);
        sample.counts.push_back({static_cast<double>(n[0]), static_cast<double>(n[1]),
                                 static_cast<double>(n[2]), static_cast<double>(n[3])});
      }
      out.fidelities[static_cast<size_t>(i)] = mle_reconstruction(sample, opts).fidelity_to(target);
    }
  };

  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }

  const auto& f = out.fidelities;
  out.mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  std::vector<double> sorted = f;
  std::sort(sorted.begin(), sorted.end());
  const size_t m = sorted.size() / 2;
  out.median = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  if (f.size() > 1) {
    double ss = 0.0;
    for (double x : f) ss += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(f.size() - 1));
  }
  out.histogram = make_histogram(f, histogram_bins);
  return out;
}

// ------------------------------------------------------------- fidelity

std::array<int, 3> bell_correlator_signs(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus: return {+1, -1, +1};
    case BellKind::PhiMinus: return {-1, +1, +1};
    case BellKind::PsiPlus: return {+1, +1, -1};
    case BellKind::PsiMinus: return {-1, -1, -1};
  }
  throw std::logic_error("bad Bell kind");
}

double fidelity_from_correlators(double xx, double yy, double zz, BellKind target) {
  for (double c : {xx, yy, zz}) {
    if (!(c >= -1.0 - 1e-12 && c <= 1.0 + 1e-12)) {
      throw std::invalid_argument("correlators must lie in [-1, 1]");
    }
  }
  const auto s = bell_correlator_signs(target);
  return 0.25 * (1.0 + s[0] * xx + s[1] * yy + s[2] * zz);
}

double fidelity_lower_bound_two_bases(const ConditionalTable& first, int sign_first,
                                      const ConditionalTable& second, int sign_second) {
  auto agreement = [](const ConditionalTable& t, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("parity sign must be +1 or -1");
    if (std::abs(t.photon_marginal[0] + t.photon_marginal[1] - 1.0) > 1e-9) {
      throw std::invalid_argument("photon marginals must sum to 1");
    }
    double c = 0.0;
    for (int b = 0; b < 2; ++b) {
      const auto p0 = t.pr(0, b);
      const auto p1 = t.pr(1, b);
      if (!p0 || !p1) {
        if (t.photon_marginal[b] > 0.0) {
          throw std::invalid_argument("conditional row missing for an observed outcome");
        }
        continue;
      }
      if (*p0 < -1e-9 || *p1 < -1e-9 || std::abs(*p0 + *p1 - 1.0) > 1e-9) {
        throw std::invalid_argument("conditional probabilities in a row must sum to 1");
      }
      const int a = sign == 1 ? b : 1 - b;
      c += t.photon_marginal[b] * (a == 0 ? *p0 : *p1);
    }
    return c;
  };
  return std::max(0.0, agreement(first, sign_first) + agreement(second, sign_second) - 1.0);
}

}  // namespace qrepsim
