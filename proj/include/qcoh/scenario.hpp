// Copyright 2026 The qcoh Authors
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

#pragma once

// Scenario configurations, dispatch and output.
//
// A configuration is a JSON document:
//
//   {
//     "scenario":  "central-spin",
//     "params":    { ... scenario specific ... },
//     "grid":      {"t_start": 0, "t_end": 10, "n_steps": 200, "sample_every": 1},
//     "estimator": {"kind": "closed-form" | "master-equation" | "trajectories",
//                   "n_traj": 1000, "seed": 7},
//     "output":    {"path": "out.csv", "format": "csv", "manifest": "out.csv.manifest.json"}
//   }
//
// Parsing fills in defaults; emit_config writes the normalized document back.

#include "qcoh/evolution.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcoh {

inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& scenario_names();

struct EstimatorConfig {
    enum class Kind { ClosedForm, MasterEquation, Trajectories };
    Kind kind = Kind::ClosedForm;
    std::size_t n_traj = 0;   // trajectories only
    std::uint64_t seed = 0;   // trajectories only

    bool operator==(const EstimatorConfig&) const = default;
};

const char* to_string(EstimatorConfig::Kind kind) noexcept;

struct OutputConfig {
    std::string path;
    std::string format = "csv";
    std::string manifest;   // defaults to <path>.manifest.json
    std::string profiles;   // damped-oscillator position densities; empty if not requested

    bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
    std::string scenario;
    nlohmann::json params = nlohmann::json::object();  // normalized, defaults applied
    TimeGrid grid;
    EstimatorConfig estimator;
    OutputConfig output;

    bool operator==(const ScenarioConfig& o) const {
        return scenario == o.scenario && params == o.params && grid.t_start == o.grid.t_start &&
               grid.t_end == o.grid.t_end && grid.n_steps == o.grid.n_steps &&
               grid.sample_every == o.grid.sample_every && estimator == o.estimator && output == o.output;
    }
};

/// Throws Validation with one "field.path: message" line per problem found.
/// An empty or blank document is read as {}.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Normalized document; parse_config(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig& config);
nlohmann::json config_to_json(const ScenarioConfig& config);

/// 64-bit FNV-1a of the normalized document, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Io error if an output file cannot be created in its directory.
void check_output_paths(const ScenarioConfig& config);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct RunManifest {
    nlohmann::json config;    // normalized config
    nlohmann::json derived;   // derived quantities, e.g. t_D
    std::string version = kVersion;
    std::string config_hash;
    double wall_time_s = 0.0;
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
    std::vector<std::string> outputs;

    bool passed() const noexcept;
    nlohmann::json to_json() const;
};

struct RunResult {
    RunManifest manifest;
    std::vector<std::pair<std::string, std::string>> files;  // (path, contents)
};

/// Runs the scenario without touching the file system. Model errors are
/// rethrown with the scenario name prefixed.
RunResult run_scenario(const ScenarioConfig& config, std::size_t workers = 0);

/// Writes every output file and the manifest.
void write_outputs(const RunResult& result);

}  // namespace qcoh
