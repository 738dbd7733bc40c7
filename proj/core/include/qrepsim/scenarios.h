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

#ifndef QREPSIM_SCENARIOS_H
#define QREPSIM_SCENARIOS_H

#include <map>
#include <string>
#include <vector>

#include "qrepsim/config.h"
#include "qrepsim/repeater.h"
#include "qrepsim/tomography.h"

/// Config-driven runs behind the command-line tool.
namespace qrepsim {

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(const std::string& s);

struct ScenarioOutput {
  /// Main artifact (CSV or JSON text).
  std::string primary;
  /// Additional artifacts keyed by file suffix, e.g. "counts.csv".
  std::map<std::string, std::string> extra;
  /// False when the result is flagged statistically unresolved.
  bool resolved = true;
  std::vector<std::string> warnings;
};

struct RateRow {
  double length_per_arm_km = 0.0;
  double p_arm = 0.0;
  double p_success = 0.0;
  double rate_hz = 0.0;
  double seconds_per_pair = 0.0;
};

/// One row per rate_table.lengths_per_arm_km entry.
std::vector<RateRow> rate_table_rows(const Config& cfg);
ScenarioOutput run_rate_table(const Config& cfg, OutputFormat format);

/// Built from the [link] and [node] sections.
LinkSpec link_from_config(const Config& cfg);
NodeSpec node_from_config(const Config& cfg);
ChainConfig chain_from_config(const Config& cfg);

/// Statistics over run.replicas independent replicas with seeds derived from
/// run.master_seed; run.workers only changes how replicas are scheduled.
TwoLinkStats run_two_link_replicas(const Config& cfg);
ChainStats run_chain_replicas(const Config& cfg);

ScenarioOutput run_two_link(const Config& cfg);
ScenarioOutput run_chain(const Config& cfg);

struct TomographyRun {
  DensityOperator rho_true = DensityOperator::maximally_mixed(2);
  PureState target = PureState::basis(2, 0);
  CountsTable counts;
  TomographyResult direct;
  TomographyResult mle;
  std::optional<BootstrapStats> bootstrap;
  /// From the ZZ (+1) and spin-X photon-Y (-1) tables when both are measured.
  std::optional<double> two_basis_bound;
};

/// Forward model + reconstructions. Throws ConfigError for informationally
/// incomplete settings before any simulation.
TomographyRun tomography_from_config(const Config& cfg);
ScenarioOutput run_tomography(const Config& cfg);

}  // namespace qrepsim

#endif  // QREPSIM_SCENARIOS_H
