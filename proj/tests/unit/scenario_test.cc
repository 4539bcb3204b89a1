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


#include "qcoh/scenario.hpp"

#include "qcoh/errors.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace qcoh {
namespace {

std::string validation_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        return e.what();
    }
    ADD_FAILURE() << "accepted:\n" << text;
    return {};
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::getline(is, line);  // comment
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

const CheckResult* find_check(const RunManifest& m, const std::string& name) {
    for (const auto& c : m.checks)
        if (c.name == name) return &c;
    return nullptr;
}

TEST(ParseConfig, EmptyDocumentListsRequiredFields) {
    for (const char* text : {"", "  \n", "{}"}) {
        const auto msg = validation_message(text);
        EXPECT_NE(msg.find("scenario: required field missing"), std::string::npos) << msg;
        EXPECT_NE(msg.find("output: required field missing"), std::string::npos) << msg;
    }
}

TEST(ParseConfig, MalformedJson) {
    EXPECT_NE(validation_message("{\"scenario\": ").find("malformed JSON"), std::string::npos);
}

TEST(ParseConfig, ErrorsCarryFieldPaths) {
    const auto msg = validation_message(R"({
      "scenario": "central-spin",
      "params": {"couplings": "strong", "colour": 1},
      "grid": {"t_end": 1, "n_steps": 1.5},
      "estimator": {"kind": "closed-form"},
      "output": {"path": "x.csv", "format": "parquet"}
    })");
    for (const char* path : {"params.couplings", "params.colour: unknown field", "grid.n_steps", "output.format"})
        EXPECT_NE(msg.find(path), std::string::npos) << path << " missing from:\n" << msg;
}

TEST(ParseConfig, TrajectoriesNeedPositiveCount) {
    const auto msg = validation_message(R"({
      "scenario": "unraveling-check", "grid": {"t_end": 1, "n_steps": 100},
      "estimator": {"kind": "trajectories", "n_traj": 0, "seed": 1}, "output": {"path": "u.csv"}})");
    EXPECT_NE(msg.find("estimator.n_traj: trajectories requires n_traj >= 1"), std::string::npos) << msg;
    const auto msg2 = validation_message(R"({
      "scenario": "central-spin", "params": {"couplings": [1]}, "grid": {"t_end": 1, "n_steps": 10},
      "estimator": {"kind": "closed-form", "seed": 3}, "output": {"path": "c.csv"}})");
    EXPECT_NE(msg2.find("estimator.seed"), std::string::npos) << msg2;
}

TEST(ParseConfig, EstimatorMustSuitScenario) {
    const auto msg = validation_message(R"({
      "scenario": "damped-oscillator", "grid": {"t_end": 1, "n_steps": 10},
      "estimator": {"kind": "trajectories", "n_traj": 5, "seed": 1}, "output": {"path": "d.csv"}})");
    EXPECT_NE(msg.find("estimator.kind"), std::string::npos) << msg;
}

TEST(ParseConfig, DefaultsAreFilledAndRoundTrip) {
    const auto cfg = parse_config(R"({
      "scenario": "central-spin", "params": {"couplings": 0.5, "bath_size": 3},
      "grid": {"t_end": 2, "n_steps": 20}, "estimator": {"kind": "closed-form"},
      "output": {"path": "out.csv"}})");
    EXPECT_EQ(cfg.params["couplings"], nlohmann::json({0.5, 0.5, 0.5}));
    EXPECT_EQ(cfg.params["omega0"], 0.0);
    EXPECT_EQ(cfg.grid.sample_every, 1u);
    EXPECT_EQ(cfg.output.manifest, "out.csv.manifest.json");
    const auto again = parse_config(emit_config(cfg));
    EXPECT_EQ(again, cfg);
    EXPECT_EQ(emit_config(again), emit_config(cfg));
    EXPECT_EQ(config_hash(again), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 16u);
}

TEST(ParseConfig, HashTracksContent) {
    const std::string base = R"({"scenario": "central-spin", "params": {"couplings": [1.0]},
      "grid": {"t_end": 2, "n_steps": 20}, "estimator": {"kind": "closed-form"}, "output": {"path": "a.csv"}})";
    std::string other = base;
    other.replace(other.find("20"), 2, "21");
    EXPECT_NE(config_hash(parse_config(base)), config_hash(parse_config(other)));
}

TEST(ParseConfig, EveryShippedExampleIsValid) {
    for (const char* name : {"central_spin", "central_spin_exact", "spin_echo", "disorder_gaussian",
                             "disorder_lorentzian_mc", "telegraph", "damped_oscillator", "unraveling_two_level"}) {
        const auto cfg = load_config(std::string(QCOH_CONFIG_DIR) + "/" + name + ".json");
        EXPECT_EQ(parse_config(emit_config(cfg)), cfg) << name;
    }
}

TEST(RunScenario, SingleBathSpinColumn) {
    const auto cfg = parse_config(R"({
      "scenario": "central-spin", "params": {"couplings": [1.0], "c1": 0.6, "c2": 0.8},
      "grid": {"t_end": 20, "n_steps": 400}, "estimator": {"kind": "closed-form"}, "output": {"path": "m1.csv"}})");
    const auto res = run_scenario(cfg);
    ASSERT_EQ(res.files.size(), 1u);
    const auto rows = csv_rows(res.files[0].second);
    ASSERT_EQ(rows.size(), 401u);
    for (const auto& r : rows) EXPECT_NEAR(r[3], std::abs(0.48 * std::cos(0.5 * r[0])), 1e-12) << r[0];
    EXPECT_TRUE(res.manifest.passed());
}

TEST(RunScenario, ExactAndClosedFormAgree) {
    const auto cfg = parse_config(R"({
      "scenario": "central-spin", "params": {"omega0": 0.7, "couplings": [0.3, 0.9, 1.4]},
      "grid": {"t_end": 10, "n_steps": 50}, "estimator": {"kind": "master-equation"},
      "output": {"path": "ex.csv"}})");
    const auto res = run_scenario(cfg);
    const auto* c = find_check(res.manifest, "closed_form_agreement");
    ASSERT_NE(c, nullptr);
    EXPECT_TRUE(c->passed);
    EXPECT_LE(c->value, 1e-10);
}

TEST(RunScenario, RerunIsByteIdentical) {
    const auto cfg = parse_config(R"({
      "scenario": "unraveling-check", "params": {"model": "two-level-decay", "rabi": 2.0},
      "grid": {"t_end": 3, "n_steps": 300, "sample_every": 30},
      "estimator": {"kind": "trajectories", "n_traj": 300, "seed": 11}, "output": {"path": "u.csv"}})");
    const auto a = run_scenario(cfg, 1);
    const auto b = run_scenario(cfg, 3);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].second, b.files[i].second);
    EXPECT_EQ(a.manifest.config_hash, b.manifest.config_hash);
    EXPECT_NE(a.files[0].second.find("config_hash=" + a.manifest.config_hash), std::string::npos);
}

TEST(RunScenario, EchoRevivalAtTwiceThePulse) {
    // Couplings with sum A^2 = 4: t_D = 0.5, pulse at 5.
    const auto cfg = parse_config(R"({
      "scenario": "spin-echo", "params": {"couplings": [1.2, 1.6]},
      "grid": {"t_end": 12, "n_steps": 240}, "estimator": {"kind": "closed-form"}, "output": {"path": "e.csv"}})");
    const auto res = run_scenario(cfg);
    EXPECT_NEAR(res.manifest.derived["t_D"].get<double>(), 0.5, 1e-15);
    const auto rows = csv_rows(res.files[0].second);
    bool seen = false;
    for (const auto& r : rows)
        if (std::abs(r[0] - 10.0) < 1e-12) {
            EXPECT_NEAR(r[3], 0.5, 1e-12);
            seen = true;
        }
    EXPECT_TRUE(seen);
    EXPECT_TRUE(res.manifest.passed());
}

TEST(RunScenario, DisorderPopulationsAreExact) {
    const auto cfg = parse_config(R"({
      "scenario": "disorder",
      "params": {"distribution": {"kind": "lorentzian", "width": 0.3}, "levels": [0, 1], "slopes": [0.5, -0.5]},
      "grid": {"t_end": 5, "n_steps": 50}, "estimator": {"kind": "closed-form"}, "output": {"path": "d.csv"}})");
    const auto res = run_scenario(cfg);
    const auto* c = find_check(res.manifest, "population_invariance");
    ASSERT_NE(c, nullptr);
    EXPECT_TRUE(c->passed);
    const auto rows = csv_rows(res.files[0].second);
    EXPECT_NEAR(rows[0][1], 0.5, 1e-15);
    for (const auto& r : rows) {
        EXPECT_EQ(r[1], rows[0][1]);
        EXPECT_EQ(r[2], rows[0][2]);
    }
}

TEST(RunScenario, ManifestListsChecksAndOutputs) {
    const auto cfg = parse_config(R"({
      "scenario": "central-spin", "params": {"couplings": [1.0, 2.0]},
      "grid": {"t_end": 2, "n_steps": 10}, "estimator": {"kind": "closed-form"}, "output": {"path": "dir/c.csv"}})");
    const auto j = run_scenario(cfg).manifest.to_json();
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_EQ(j["config"], config_to_json(cfg));
    EXPECT_TRUE(j["checks"].is_array());
    EXPECT_FALSE(j["checks"].empty());
    EXPECT_EQ(j["outputs"], nlohmann::json({"dir/c.csv", "dir/c.csv.manifest.json"}));
}

TEST(CheckOutputPaths, MissingDirectoryIsIoError) {
    const auto cfg = parse_config(R"({
      "scenario": "central-spin", "params": {"couplings": [1.0]},
      "grid": {"t_end": 2, "n_steps": 10}, "estimator": {"kind": "closed-form"}, "output": {"path": "/nonexistent-qcoh-dir/c.csv"}})");
    try {
        check_output_paths(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

}  // namespace
}  // namespace qcoh
