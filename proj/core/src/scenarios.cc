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

#include "qrepsim/scenarios.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qrepsim/random.h"
#include "qrepsim/source.h"

namespace qrepsim {

namespace {

using json = nlohmann::ordered_json;

json config_json(const Config& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries()) {
    const auto dot = k.find('.');
    j[k.substr(0, dot)][k.substr(dot + 1)] = v;
  }
  return j;
}

json latency_json(const LatencyStats& l) {
  return json{{"mean_s", l.mean_s}, {"stddev_s", l.stddev_s}, {"min_s", l.min_s},
              {"max_s", l.max_s}};
}

json events_json(const std::vector<SimEvent>& events) {
  json out = json::array();
  for (const SimEvent& e : events) {
    json j{{"time_s", e.time_s}, {"kind", std::string(to_string(e.kind))}};
    if (e.link >= 0) j["link"] = e.link;
    if (e.memory >= 0) j["memory"] = e.memory;
    if (e.memory_b >= 0) j["memory_b"] = e.memory_b;
    if (e.kind == SimEvent::Kind::Decay) {
      j["from_s"] = e.from_s;
      j["to_s"] = e.to_s;
    }
    if (e.kind == SimEvent::Kind::Delivery) j["fidelity"] = e.value;
    out.push_back(j);
  }
  return out;
}

std::string flat_csv(const json& results) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : results.items()) {
    if (v.is_structured()) {
      for (const auto& [k2, v2] : v.items()) out << k << '.' << k2 << ',' << v2.dump() << '\n';
    } else {
      out << k << ',' << v.dump() << '\n';
    }
  }
  return out.str();
}

std::string render(const json& doc, OutputFormat format) {
  if (format == OutputFormat::Csv) return flat_csv(doc.at("results"));
  return doc.dump(2) + "\n";
}

template <typename Fn>
void run_parallel(int n_tasks, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, n_tasks));
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n_tasks; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<std::int64_t> split_rounds(std::int64_t total, int replicas) {
  std::vector<std::int64_t> out(static_cast<size_t>(replicas), total / replicas);
  for (std::int64_t i = 0; i < total % replicas; ++i) ++out[static_cast<size_t>(i)];
  return out;
}

int replica_count(const Config& cfg, std::int64_t rounds) {
  const std::int64_t r = cfg.get_int("run.replicas");
  if (r < 1) throw ConfigError("run.replicas must be at least 1");
  if (r > rounds) throw ConfigError("run.replicas exceeds the number of rounds");
  return static_cast<int>(r);
}

int worker_count(const Config& cfg) {
  const std::int64_t w = cfg.get_int("run.workers");
  if (w < 1) throw ConfigError("run.workers must be at least 1");
  return static_cast<int>(w);
}

// Pools per-replica latency summaries weighted by delivery counts.
LatencyStats pool_latency(const std::vector<TwoLinkStats>& parts) {
  LatencyStats out;
  double n = 0.0, sum = 0.0, sumsq = 0.0;
  bool first = true;
  for (const TwoLinkStats& p : parts) {
    const double k = static_cast<double>(p.deliveries);
    if (k == 0.0) continue;
    n += k;
    sum += k * p.latency.mean_s;
    sumsq += (k - 1.0) * p.latency.stddev_s * p.latency.stddev_s + k * p.latency.mean_s * p.latency.mean_s;
    out.min_s = first ? p.latency.min_s : std::min(out.min_s, p.latency.min_s);
    out.max_s = first ? p.latency.max_s : std::max(out.max_s, p.latency.max_s);
    first = false;
  }
  if (n > 0.0) out.mean_s = sum / n;
  if (n > 1.0) out.stddev_s = std::sqrt(std::max(0.0, (sumsq - n * out.mean_s * out.mean_s) / (n - 1.0)));
  return out;
}

std::vector<std::string> coherence_warnings(const Config& cfg, const LinkSpec& link) {
  std::vector<std::string> w;
  const double t2 = cfg.get_double("node.t2_us") * 1e-6;
  if (std::isinf(t2)) return w;
  const CoherenceBudget b = check_coherence_budget(link.channel.length_km, link.channel.n_core, t2,
                                                   link.attempt_period(), link.p_success());
  if (!b.propagation_ok) {
    std::ostringstream s;
    s << "memory T2 (" << t2 << " s) is shorter than the herald round trip ("
      << b.herald_round_trip_s << " s)";
    w.push_back(s.str());
  }
  if (!b.rate_ok) {
    std::ostringstream s;
    s << "memory T2 (" << t2 << " s) is shorter than T_rep / p_success ("
      << b.required_t2_for_rate_s << " s)";
    w.push_back(s.str());
  }
  return w;
}

double expected_max_geometric(double p1, double p2) {
  return 1.0 / p1 + 1.0 / p2 - 1.0 / (1.0 - (1.0 - p1) * (1.0 - p2));
}

std::vector<BasisSetting> settings_from_config(const Config& cfg) {
  std::vector<BasisSetting> out;
  std::string list = cfg.get_string("tomography.settings");
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (item.size() != 2) throw ConfigError("tomography.settings entries look like 'ZX'");
    try {
      out.push_back({axis_from_char(item[0]), axis_from_char(item[1])});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

}  // namespace

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("format must be csv or json, got '" + s + "'");
}

// ----------------------------------------------------------- rate table

std::vector<RateRow> rate_table_rows(const Config& cfg) {
  const double r0 = cfg.get_double("rate_table.source_rate_hz");
  const double alpha = cfg.get_double("rate_table.alpha_db_per_km");
  const double eta = cfg.get_double("rate_table.detector_efficiency");
  if (!(r0 > 0.0)) throw ConfigError("rate_table.source_rate_hz must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("rate_table.alpha_db_per_km must be nonnegative");
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("rate_table.detector_efficiency must lie in (0, 1]");
  std::vector<RateRow> rows;
  for (double l : cfg.get_double_list("rate_table.lengths_per_arm_km")) {
    if (!(l >= 0.0)) throw ConfigError("lengths must be nonnegative");
    RateRow r;
    r.length_per_arm_km = l;
    r.p_arm = transmission_probability(l, alpha);
    r.p_success = (eta * r.p_arm) * (eta * r.p_arm);
    r.rate_hz = r0 * r.p_success;
    r.seconds_per_pair = 1.0 / r.rate_hz;
    rows.push_back(r);
  }
  return rows;
}

ScenarioOutput run_rate_table(const Config& cfg, OutputFormat format) {
  const std::vector<RateRow> rows = rate_table_rows(cfg);
  ScenarioOutput out;
  if (format == OutputFormat::Csv) {
    std::ostringstream s;
    s.precision(10);
    s << "L_per_arm_km,p_arm,p_success,rate_Hz,seconds_per_pair\n";
    for (const RateRow& r : rows) {
      s << r.length_per_arm_km << ',' << r.p_arm << ',' << r.p_success << ',' << r.rate_hz << ','
        << r.seconds_per_pair << '\n';
    }
    out.primary = s.str();
  } else {
    json table = json::array();
    for (const RateRow& r : rows) {
      table.push_back(json{{"L_per_arm_km", r.length_per_arm_km},
                           {"p_arm", r.p_arm},
                           {"p_success", r.p_success},
                           {"rate_Hz", r.rate_hz},
                           {"seconds_per_pair", r.seconds_per_pair}});
    }
    json doc{{"scenario", "rate-table"}, {"config", config_json(cfg)}, {"results", table}};
    out.primary = doc.dump(2) + "\n";
  }
  return out;
}

// ------------------------------------------------------ links and chains

LinkSpec link_from_config(const Config& cfg) {
  LinkSpec l;
  l.channel.length_km = cfg.get_double("link.length_km");
  l.channel.attenuation_db_per_km = cfg.get_double("link.alpha_db_per_km");
  l.channel.n_core = cfg.get_double("link.n_core");
  l.source_rate_hz = cfg.get_double("link.source_rate_hz");
  if (cfg.has("link.p_success")) l.p_success_override = cfg.get_double("link.p_success");
  l.detectors.efficiency = cfg.get_double("link.detector_efficiency");
  try {
    l.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[link] ") + e.what());
  }
  return l;
}

NodeSpec node_from_config(const Config& cfg) {
  NodeSpec n;
  n.memory_t2_s = cfg.get_double("node.t2_us") * 1e-6;
  n.local_op_time_s = cfg.get_double("node.local_op_time_us") * 1e-6;
  n.swap_depolarizing = cfg.get_double("node.swap_depolarizing");
  try {
    n.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[node] ") + e.what());
  }
  return n;
}

ChainConfig chain_from_config(const Config& cfg) {
  const std::int64_t n = cfg.get_int("chain.nodes");
  if (n < 2 || n > 4096) throw ConfigError("chain.nodes must lie in [2, 4096]");
  ChainConfig c;
  c.nodes.assign(static_cast<size_t>(n), node_from_config(cfg));
  c.links.assign(static_cast<size_t>(n - 1), link_from_config(cfg));
  c.heralded = cfg.get_bool("chain.heralded");
  const std::string proto = cfg.get_string("chain.protocol");
  if (proto == "stop-on-success") {
    c.protocol = ChainProtocol::StopOnSuccess;
  } else if (proto == "reset-on-full-chain") {
    c.protocol = ChainProtocol::ResetOnFullChain;
  } else {
    throw ConfigError("chain.protocol must be stop-on-success or reset-on-full-chain");
  }
  return c;
}

TwoLinkStats run_two_link_replicas(const Config& cfg) {
  const LinkSpec link = link_from_config(cfg);
  const NodeSpec node = node_from_config(cfg);
  const std::int64_t rounds = cfg.get_int("two_link.max_rounds");
  if (rounds < 1) throw ConfigError("two_link.max_rounds must be positive");
  const int replicas = replica_count(cfg, rounds);
  const std::uint64_t seed = cfg.get_uint64("run.master_seed");
  const auto per = split_rounds(rounds, replicas);

  TwoLinkOptions base;
  base.use_memory = cfg.get_bool("two_link.use_memory");
  const bool record = cfg.get_bool("two_link.record_events");

  std::vector<TwoLinkStats> parts(static_cast<size_t>(replicas));
  run_parallel(replicas, worker_count(cfg), [&](int i) {
    TwoLinkOptions o = base;
    o.max_rounds = per[static_cast<size_t>(i)];
    o.record_events = record && i == 0;
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    parts[static_cast<size_t>(i)] =
        simulate_two_link_protocol(link, link, {node, node, node}, rng, o);
  });

  TwoLinkStats total;
  double fsum = 0.0;
  for (const TwoLinkStats& p : parts) {
    total.deliveries += p.deliveries;
    total.rounds += p.rounds;
    total.elapsed_s += p.elapsed_s;
    fsum += p.mean_fidelity * static_cast<double>(p.deliveries);
  }
  total.rate_hz = static_cast<double>(total.deliveries) / total.elapsed_s;
  total.resolved = total.deliveries > 0;
  if (total.deliveries > 0) total.mean_fidelity = fsum / static_cast<double>(total.deliveries);
  total.latency = pool_latency(parts);
  total.events = std::move(parts[0].events);
  return total;
}

ChainStats run_chain_replicas(const Config& cfg) {
  const ChainConfig chain = chain_from_config(cfg);
  const std::int64_t rounds = cfg.get_int("chain.max_rounds");
  if (rounds < 1) throw ConfigError("chain.max_rounds must be positive");
  const int replicas = replica_count(cfg, rounds);
  const std::uint64_t seed = cfg.get_uint64("run.master_seed");
  const auto per = split_rounds(rounds, replicas);
  const bool record = cfg.get_bool("chain.record_events");

  std::vector<ChainStats> parts(static_cast<size_t>(replicas));
  run_parallel(replicas, worker_count(cfg), [&](int i) {
    ChainOptions o;
    o.max_rounds = per[static_cast<size_t>(i)];
    o.record_events = record && i == 0;
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    parts[static_cast<size_t>(i)] = simulate_chain(chain, rng, o);
  });

  ChainStats total;
  double fsum = 0.0, rsum = 0.0;
  for (const ChainStats& p : parts) {
    total.completions += p.completions;
    total.rounds += p.rounds;
    total.elapsed_s += p.elapsed_s;
    fsum += p.mean_fidelity * static_cast<double>(p.completions);
    rsum += p.mean_completion_rounds * static_cast<double>(p.completions);
    for (const auto& [k, v] : p.completion_rounds) total.completion_rounds[k] += v;
  }
  total.rate_hz = static_cast<double>(total.completions) / total.elapsed_s;
  if (total.completions > 0) {
    total.mean_fidelity = fsum / static_cast<double>(total.completions);
    total.mean_completion_rounds = rsum / static_cast<double>(total.completions);
  }
  double all = 1.0;
  for (const LinkSpec& l : chain.links) all *= l.p_success();
  const bool same_round_only = !chain.heralded || chain.protocol == ChainProtocol::ResetOnFullChain;
  total.resolved = total.completions > 0 &&
                   !(same_round_only && all < 1.0 / static_cast<double>(total.rounds));
  total.events = std::move(parts[0].events);
  return total;
}

ScenarioOutput run_two_link(const Config& cfg) {
  const OutputFormat format = parse_format(cfg.get_string("run.format"));
  const LinkSpec link = link_from_config(cfg);
  ScenarioOutput out;
  out.warnings = coherence_warnings(cfg, link);
  const TwoLinkStats s = run_two_link_replicas(cfg);
  out.resolved = s.resolved;

  const double slot = link.attempt_period();
  const double p = link.p_success();
  const double p_l = p * p;
  const double toy = 0.67 * std::sqrt(p_l) / slot;
  const double memoryless = p_l / slot;
  const double analytic =
      cfg.get_bool("two_link.use_memory") ? 1.0 / (slot * expected_max_geometric(p, p)) : memoryless;

  json results{{"deliveries", s.deliveries},
               {"rounds", s.rounds},
               {"slot_s", slot},
               {"elapsed_s", s.elapsed_s},
               {"rate_hz", s.rate_hz},
               {"analytic_rate_hz", analytic},
               {"toy_rate_hz", toy},
               {"rate_over_toy", s.rate_hz / toy},
               {"memoryless_rate_hz", memoryless},
               {"rate_over_memoryless", s.rate_hz / memoryless},
               {"mean_fidelity", s.mean_fidelity},
               {"latency", latency_json(s.latency)},
               {"resolved", s.resolved}};
  json doc{{"scenario", "two-link"},
           {"config", config_json(cfg)},
           {"warnings", out.warnings},
           {"results", results}};
  if (cfg.get_bool("two_link.record_events")) {
    doc["events"] = events_json(s.events);
    doc["event_audit"] = audit_event_log(s.events);
  }
  out.primary = render(doc, format);
  return out;
}

ScenarioOutput run_chain(const Config& cfg) {
  const OutputFormat format = parse_format(cfg.get_string("run.format"));
  const ChainConfig chain = chain_from_config(cfg);
  ScenarioOutput out;
  out.warnings = coherence_warnings(cfg, chain.links.front());
  const ChainStats s = run_chain_replicas(cfg);
  out.resolved = s.resolved;
  if (!s.resolved) out.warnings.push_back("too few completions to resolve the chain rate");

  const double slot = chain.links.front().attempt_period();
  const double p = chain.links.front().p_success();
  const double n = static_cast<double>(chain.nodes.size());
  json hist = json::object();
  for (const auto& [k, v] : s.completion_rounds) hist[std::to_string(k)] = v;
  json results{{"nodes", chain.nodes.size()},
               {"heralded", chain.heralded},
               {"completions", s.completions},
               {"rounds", s.rounds},
               {"elapsed_s", s.elapsed_s},
               {"rate_hz", s.rate_hz},
               {"completion_probability_per_round",
                static_cast<double>(s.completions) / static_cast<double>(s.rounds)},
               {"unheralded_rate_hz", std::pow(p, n - 1.0) / slot},
               {"log_form_rate_hz", p / (slot * std::log(n))},
               {"mean_completion_rounds", s.mean_completion_rounds},
               {"mean_fidelity", s.mean_fidelity},
               {"resolved", s.resolved},
               {"completion_rounds_histogram", hist}};
  json doc{{"scenario", "chain"},
           {"config", config_json(cfg)},
           {"warnings", out.warnings},
           {"results", results}};
  if (cfg.get_bool("chain.record_events")) {
    doc["events"] = events_json(s.events);
    doc["event_audit"] = audit_event_log(s.events);
  }
  out.primary = render(doc, format);
  return out;
}

// ------------------------------------------------------------ tomography

TomographyRun tomography_from_config(const Config& cfg) {
  const std::vector<BasisSetting> settings = settings_from_config(cfg);
  try {
    check_informationally_complete(settings);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  SourceImperfections imp;
  imp.init_fidelity = cfg.get_double("tomography.init_fidelity");
  imp.depolarizing_prob = cfg.get_double("tomography.depolarizing_prob");
  imp.detection_window_s = cfg.get_double("tomography.detection_window_ps") * 1e-12;
  const double larmor = cfg.get_double("tomography.larmor_period_ps") * 1e-12;
  DetectorModel det;
  det.dark_count_prob = cfg.get_double("tomography.dark_count_prob");
  const double shots = cfg.get_double("tomography.shots_per_setting");
  const std::int64_t resamples = cfg.get_int("tomography.bootstrap_resamples");
  const std::int64_t bins = cfg.get_int("tomography.histogram_bins");
  if (!(shots >= 1.0)) throw ConfigError("tomography.shots_per_setting must be at least 1");
  if (resamples < 0) throw ConfigError("tomography.bootstrap_resamples must be nonnegative");
  if (bins < 1) throw ConfigError("tomography.histogram_bins must be positive");

  TomographyRun run;
  try {
    imp.validate();
    det.validate();
    run.target = ideal_spin_photon_vector();
    run.rho_true = apply_source_imperfections(ideal_spin_photon_state(), imp,
                                              QDSourceModel::from_larmor_period(larmor));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[tomography] ") + e.what());
  }

  const std::uint64_t seed = cfg.get_uint64("run.master_seed");
  if (cfg.get_bool("tomography.analytic")) {
    run.counts = expected_counts(run.rho_true, settings, shots, det);
  } else {
    std::mt19937_64 rng(derive_seed(seed, 0));
    run.counts = simulate_counts(run.rho_true, settings, std::llround(shots), det, rng);
  }

  run.direct = direct_reconstruction(correlators_from_counts(run.counts));
  run.direct.fidelity = run.direct.fidelity_to(run.target);
  run.mle = mle_reconstruction(run.counts);
  run.mle.fidelity = run.mle.fidelity_to(run.target);

  const auto tables = conditional_probabilities(run.counts);
  const ConditionalTable* zz = nullptr;
  const ConditionalTable* xy = nullptr;
  for (const ConditionalTable& t : tables) {
    if (t.setting == BasisSetting{Axis::Z, Axis::Z}) zz = &t;
    if (t.setting == BasisSetting{Axis::X, Axis::Y}) xy = &t;
  }
  // The target is stabilized by +ZZ and -XY (spin, photon).
  if (zz && xy) run.two_basis_bound = fidelity_lower_bound_two_bases(*zz, +1, *xy, -1);

  if (resamples > 0) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    run.bootstrap = bootstrap_statistics(run.counts, run.target, static_cast<int>(resamples), rng,
                                         worker_count(cfg), static_cast<int>(bins));
  }
  return run;
}

ScenarioOutput run_tomography(const Config& cfg) {
  const OutputFormat format = parse_format(cfg.get_string("run.format"));
  const TomographyRun run = tomography_from_config(cfg);
  ScenarioOutput out;

  json results{{"true_fidelity", fidelity(run.rho_true, run.target)},
               {"direct_fidelity", *run.direct.fidelity},
               {"direct_min_eigenvalue", run.direct.min_eigenvalue},
               {"mle_fidelity", *run.mle.fidelity},
               {"mle_iterations", run.mle.iterations},
               {"mle_converged", run.mle.converged},
               {"two_basis_bound", run.two_basis_bound ? json(*run.two_basis_bound) : json(nullptr)}};
  if (run.bootstrap) {
    const BootstrapStats& b = *run.bootstrap;
    results["bootstrap"] = json{{"resamples", b.fidelities.size()},
                                {"mean", b.mean},
                                {"median", b.median},
                                {"std", b.stddev ? json(*b.stddev) : json(nullptr)}};
    std::ostringstream h;
    h.precision(10);
    h << "bin_low,bin_high,count\n";
    for (size_t i = 0; i < b.histogram.counts.size(); ++i) {
      h << b.histogram.edges[i] << ',' << b.histogram.edges[i + 1] << ',' << b.histogram.counts[i]
        << '\n';
    }
    out.extra["histogram.csv"] = h.str();
  }
  out.extra["counts.csv"] = run.counts.to_csv();

  json doc{{"scenario", "tomography"},
           {"config", config_json(cfg)},
           {"warnings", json::array()},
           {"results", results},
           {"direct", json::parse(to_json(run.direct))},
           {"mle", json::parse(to_json(run.mle))}};
  out.primary = render(doc, format);
  return out;
}

}  // namespace qrepsim
