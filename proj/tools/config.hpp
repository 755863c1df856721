// Copyright 2026 The dqrecover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration files: YAML with the six sections body, geometry,
// contact, controller, sim and experiment. Parsing is strict: unknown
// sections or keys, wrong types and missing sections are errors carrying the
// file line and column.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dqr/harness.hpp"

namespace dqr::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct KeyInfo {
  std::string section;
  std::string key;
  std::string type;
  std::string default_value;  // rendered from a default-constructed ExperimentConfig
  std::string help;
};

/// Every accepted key, in documentation order.
std::vector<KeyInfo> config_keys();

inline const std::vector<std::string> kSections = {"body", "geometry", "contact", "controller", "sim", "experiment"};

/// Parses `text`; `source` names the input in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads and parses a file. Throws ConfigError (also for unreadable files).
ExperimentConfig load_config(const std::string& path);

/// Help text listing every section and key with type, default and meaning.
std::string config_reference();

/// Renders `cfg` as a complete configuration file that parses back to it.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace dqr::cli
