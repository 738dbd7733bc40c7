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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrepsim/config.h"
#include "qrepsim/scenarios.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnresolved = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::optional<std::string> format;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (overrides run.master_seed)");
  cmd->add_option("--workers", f.workers, "worker threads (overrides run.workers)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output path (default: stdout)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--set", f.sets, "section.key=value override (repeatable)")
      ->allow_extra_args(false);
}

qrepsim::Config load(const CommonFlags& f) {
  std::vector<std::string> overrides = f.sets;
  if (f.seed) overrides.push_back("run.master_seed=" + std::to_string(*f.seed));
  if (f.workers) overrides.push_back("run.workers=" + std::to_string(*f.workers));
  if (f.format) overrides.push_back("run.format=" + *f.format);
  if (f.config_path.empty()) return qrepsim::Config::from_ini_text("", overrides);
  return qrepsim::Config::from_file(f.config_path, overrides);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw qrepsim::ConfigError("cannot write '" + path.string() + "'");
  o << text;
}

// Extras land next to --out as <stem>.<suffix>; without --out they are skipped.
int emit(const qrepsim::ScenarioOutput& out, const qrepsim::Config& cfg, const std::string& path,
         bool echo_config_separately) {
  for (const std::string& w : out.warnings) std::cerr << "warning: " << w << '\n';
  if (path.empty()) {
    std::cout << out.primary;
    if (echo_config_separately) std::cerr << "# resolved configuration\n" << cfg.to_ini();
  } else {
    const std::filesystem::path p(path);
    write_file(p, out.primary);
    const std::filesystem::path stem = p.parent_path() / p.stem();
    for (const auto& [suffix, text] : out.extra) write_file(stem.string() + "." + suffix, text);
    if (echo_config_separately) write_file(stem.string() + ".config.ini", cfg.to_ini());
  }
  if (!out.resolved) {
    std::cerr << "result flagged statistically unresolved\n";
    return kExitUnresolved;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum repeater link, chain and tomography simulator"};
  app.require_subcommand(1);

  CommonFlags rate_f, link_f, chain_f, tomo_f;
  CLI::App* rate = app.add_subcommand("rate-table", "heralded link rate versus distance");
  CLI::App* link = app.add_subcommand("link-sim", "two-link repeater Monte Carlo");
  CLI::App* chain = app.add_subcommand("chain-sim", "N-node chain Monte Carlo");
  CLI::App* tomo = app.add_subcommand("tomo", "spin-photon tomography round trip");
  add_common(rate, rate_f);
  add_common(link, link_f);
  add_common(chain, chain_f);
  add_common(tomo, tomo_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (rate->parsed()) {
      const qrepsim::Config cfg = load(rate_f);
      const auto format = qrepsim::parse_format(cfg.get_string("run.format"));
      return emit(qrepsim::run_rate_table(cfg, format), cfg, rate_f.out,
                  format == qrepsim::OutputFormat::Csv);
    }
    if (link->parsed()) {
      const qrepsim::Config cfg = load(link_f);
      return emit(qrepsim::run_two_link(cfg), cfg, link_f.out,
                  qrepsim::parse_format(cfg.get_string("run.format")) == qrepsim::OutputFormat::Csv);
    }
    if (chain->parsed()) {
      const qrepsim::Config cfg = load(chain_f);
      return emit(qrepsim::run_chain(cfg), cfg, chain_f.out,
                  qrepsim::parse_format(cfg.get_string("run.format")) == qrepsim::OutputFormat::Csv);
    }
    if (tomo->parsed()) {
      const qrepsim::Config cfg = load(tomo_f);
      return emit(qrepsim::run_tomography(cfg), cfg, tomo_f.out,
                  qrepsim::parse_format(cfg.get_string("run.format")) == qrepsim::OutputFormat::Csv);
    }
  } catch (const qrepsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
