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

#include "qrepsim/config.h"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrepsim {

const std::vector<std::pair<std::string, std::string>>& config_defaults() {
  static const std::vector<std::pair<std::string, std::string>> defaults = {
      {"run.master_seed", "1"},
      {"run.workers", "1"},
      {"run.replicas", "1"},
      {"run.format", "json"},

      {"rate_table.source_rate_hz", "1e6"},
      {"rate_table.alpha_db_per_km", "0.17"},
      {"rate_table.lengths_per_arm_km", "0,10,100,200,300"},
      {"rate_table.detector_efficiency", "1"},

      {"link.length_km", "0"},  // node to node, heralding station at the midpoint
      {"link.alpha_db_per_km", "0.17"},
      {"link.n_core", "1.468"},
      {"link.source_rate_hz", "1e6"},
      {"link.p_success", "0.05"},  // empty: derived from length and loss
      {"link.detector_efficiency", "1"},

      {"node.t2_us", "inf"},
      {"node.local_op_time_us", "0"},
      {"node.swap_depolarizing", "0"},

      {"two_link.use_memory", "true"},
      {"two_link.max_rounds", "1000000"},
      {"two_link.record_events", "false"},

      {"chain.nodes", "3"},
      {"chain.heralded", "true"},
      {"chain.protocol", "stop-on-success"},
      {"chain.max_rounds", "1000000"},
      {"chain.record_events", "false"},

      {"tomography.preset", "ideal"},
      {"tomography.shots_per_setting", "10000"},
      {"tomography.analytic", "false"},
      {"tomography.init_fidelity", "1"},
      {"tomography.depolarizing_prob", "0"},
      {"tomography.detection_window_ps", "0"},
      {"tomography.larmor_period_ps", "57"},
      {"tomography.dark_count_prob", "0"},
      {"tomography.bootstrap_resamples", "300"},
      {"tomography.histogram_bins", "20"},
      {"tomography.settings", "ZZ,ZX,ZY,XZ,XX,XY,YZ,YX,YY"},
  };
  return defaults;
}

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>&
tomography_presets() {
  // "realistic": an 8 ps detection window against a 57 ps Larmor period, a small
  // initialization error and depolarizing background, at low count numbers.
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> presets =
      {
          {"ideal", {}},
          {"realistic",
           {{"tomography.detection_window_ps", "8"},
            {"tomography.larmor_period_ps", "57"},
            {"tomography.init_fidelity", "0.97"},
            {"tomography.depolarizing_prob", "0.04"},
            {"tomography.shots_per_setting", "40"}}},
      };
  return presets;
}

namespace {

std::string trim(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

}  // namespace

Config::Config() {
  for (const auto& [k, v] : config_defaults()) values_[k] = v;
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  const std::string key = trim(dotted_key);
  if (!values_.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  user_[key] = trim(value);
  apply_preset();
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form section.key=value");
  }
  set(std::string(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

void Config::apply_preset() {
  for (const auto& [k, v] : config_defaults()) values_[k] = v;
  const auto preset_it = user_.find("tomography.preset");
  const std::string preset =
      preset_it != user_.end() ? preset_it->second : values_.at("tomography.preset");
  const auto& presets = tomography_presets();
  auto p = presets.find(preset);
  if (p == presets.end()) throw ConfigError("unknown tomography preset '" + preset + "'");
  for (const auto& [k, v] : p->second) values_[k] = v;
  for (const auto& [k, v] : user_) values_[k] = v;
}

Config Config::from_ini_text(std::string_view text, const std::vector<std::string>& overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  Config cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' must live inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string dotted = section + "." + key;
      if (!cfg.values_.count(dotted)) {
        throw ConfigError("unknown configuration key '" + dotted + "'");
      }
      cfg.user_[dotted] = trim(value.data());
    }
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    }
    const std::string key = trim(o.substr(0, eq));
    if (!cfg.values_.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    cfg.user_[key] = trim(o.substr(eq + 1));
  }
  cfg.apply_preset();
  return cfg;
}

Config Config::from_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return from_ini_text(buf.str(), overrides);
}

bool Config::has(const std::string& key) const {
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key) const {
  const std::string& v = raw(key);
  if (v.empty()) throw ConfigError("missing value for '" + key + "'");
  return v;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || std::isnan(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

std::uint64_t Config::get_uint64(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a nonnegative integer, got '" + v + "'");
  }
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = boost::algorithm::to_lower_copy(get_string(key));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<std::string> parts;
  const std::string v = get_string(key);
  boost::algorithm::split(parts, v, boost::algorithm::is_any_of(","));
  std::vector<double> out;
  for (std::string p : parts) {
    p = trim(p);
    if (p.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(p, &pos));
      if (pos != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a comma-separated list of numbers");
    }
  }
  if (out.empty()) throw ConfigError("'" + key + "' is an empty list");
  return out;
}

std::string Config::to_ini() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [k, v] : values_) {
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << k.substr(dot + 1) << " = " << v << '\n';
  }
  return out.str();
}

}  // namespace qrepsim
