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

#ifndef QREPSIM_CONFIG_H
#define QREPSIM_CONFIG_H

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/// Sectioned key = value configuration. Every physical quantity carries its
/// unit in the key name (length_km, t2_us, ...).
namespace qrepsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved configuration: built-in defaults, then the tomography
/// preset, then the file, then command-line overrides.
class Config {
 public:
  /// Defaults only.
  Config();

  /// Parses INI text ([section] / key = value). Unknown sections or keys
  /// raise ConfigError.
  static Config from_ini_text(std::string_view text,
                              const std::vector<std::string>& overrides = {});
  static Config from_file(const std::string& path,
                          const std::vector<std::string>& overrides = {});

  /// Applies one "section.key=value" override.
  void set(std::string_view assignment);
  void set(const std::string& dotted_key, const std::string& value);

  bool has(const std::string& dotted_key) const;
  const std::string& raw(const std::string& dotted_key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Resolved entries in key order.
  const std::map<std::string, std::string>& entries() const { return values_; }
  /// INI rendering of the resolved configuration.
  std::string to_ini() const;

 private:
  void apply_preset();

  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> user_;  // explicitly set keys
};

/// Known keys with their defaults, in declaration order.
const std::vector<std::pair<std::string, std::string>>& config_defaults();

/// Key overrides for tomography.preset values ("ideal", "realistic").
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>&
tomography_presets();

}  // namespace qrepsim

#endif  // QREPSIM_CONFIG_H
