// Copyright 2026 The qsdc-ghz Authors
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

// Experiment runner behind the qsdc_sim command line tool.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsdc/channel.hpp"
#include "qsdc/protocol.hpp"

namespace qsdc {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Bad command line or config value; `key()` names the offending flag.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Report could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { kRun, kAttackSweep, kFamilyVerify, kLeakageTable };
enum class OutputFormat { kJson, kCsv };

struct ExperimentSpec {
  Mode mode = Mode::kRun;
  ProtocolConfig protocol;
  /// Random payload messages per session; defaults to one batch of payload slots.
  std::size_t payload_messages = 0;
  ChannelModel channel;
  std::string attack = "none";
  std::optional<double> attack_param;
  std::vector<double> sweep_values{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t trials = 1000;
  std::size_t eve_trials = 10000;
  std::uint64_t seed = 0;
  bool seed_generated = false;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::kJson;
  std::size_t jobs = 1;
  bool verbose_trials = false;
};

/// Parses `args` (subcommand first, program name excluded). `config_text`
/// overrides reading the file named by --config. Flags take precedence over
/// config entries. Throws UsageError.
ExperimentSpec parse_spec(std::span<const std::string> args, std::optional<std::string> config_text = std::nullopt);

struct AggregateReport {
  nlohmann::json document;
  /// Header plus rows; mode-specific columns.
  std::string csv;
};

AggregateReport run_experiment(const ExperimentSpec& spec);

/// Serialized report in the requested format, without trailing timing noise
/// beyond the `wall_clock_seconds` field.
std::string render_report(const AggregateReport& report, OutputFormat format);

/// Writes via a temporary file and rename; throws IoError and leaves no
/// partial file on failure.
void write_report_atomically(const std::string& path, const std::string& content);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

std::string mode_name(Mode mode);

}  // namespace qsdc
