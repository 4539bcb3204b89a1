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

// qcoh: run open-system scenarios from JSON configurations.
//
// Exit codes: 0 all checks passed, 1 a check failed or the run errored,
// 2 usage error (bad arguments, unreadable or invalid configuration).

#include "qcoh/qcoh.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

int report_error(qcoh_status s) {
    std::fprintf(stderr, "qcoh: %s error: %s\n", qcoh_status_name(s), qcoh_last_error());
    return s == QCOH_ERR_VALIDATION || s == QCOH_ERR_IO || s == QCOH_ERR_INVALID_ARGUMENT ? kExitUsage
                                                                                           : kExitCheckFailed;
}

qcoh_config* load(const std::string& path, int& exit_code) {
    qcoh_config* cfg = nullptr;
    const qcoh_status s = qcoh_config_load(path.c_str(), &cfg);
    if (s != QCOH_OK) {
        std::fprintf(stderr, "qcoh: invalid configuration %s\n%s\n", path.c_str(), qcoh_last_error());
        exit_code = kExitUsage;
        return nullptr;
    }
    return cfg;
}

int cmd_validate(const std::string& path) {
    int code = kExitOk;
    qcoh_config* cfg = load(path, code);
    if (cfg == nullptr) return code;
    char* text = nullptr;
    qcoh_status s = qcoh_config_emit(cfg, &text);
    if (s == QCOH_OK) {
        std::fputs(text, stdout);
        qcoh_string_free(text);
        s = qcoh_config_check_paths(cfg);
    }
    qcoh_config_free(cfg);
    if (s != QCOH_OK) return report_error(s);
    return kExitOk;
}

int cmd_run(const std::string& path, std::size_t workers, bool quiet) {
    int code = kExitOk;
    qcoh_config* cfg = load(path, code);
    if (cfg == nullptr) return code;
    if (qcoh_status s = qcoh_config_check_paths(cfg); s != QCOH_OK) {
        qcoh_config_free(cfg);
        return report_error(s);
    }
    qcoh_manifest* m = nullptr;
    const qcoh_status s = qcoh_run(cfg, 1, workers, &m);
    const std::string manifest_path = qcoh_config_manifest_path(cfg);
    qcoh_config_free(cfg);
    if (s != QCOH_OK) {
        std::fprintf(stderr, "qcoh: %s error: %s\n", qcoh_status_name(s), qcoh_last_error());
        return s == QCOH_ERR_IO ? kExitUsage : kExitCheckFailed;
    }
    const std::size_t n = qcoh_manifest_check_count(m);
    for (std::size_t i = 0; i < n; ++i) {
        const char* name = nullptr;
        int passed = 0;
        double value = 0.0, threshold = 0.0;
        qcoh_manifest_check(m, i, &name, &passed, &value, &threshold);
        if (!quiet || !passed)
            std::printf("%s %s value=%.17g threshold=%.17g\n", passed ? "PASS" : "FAIL", name, value, threshold);
    }
    for (std::size_t i = 0; i < qcoh_manifest_warning_count(m); ++i)
        std::fprintf(stderr, "qcoh: warning: %s\n", qcoh_manifest_warning(m, i));
    if (!quiet) std::printf("manifest %s (%.3f s)\n", manifest_path.c_str(), qcoh_manifest_wall_time(m));
    const bool ok = qcoh_manifest_passed(m) != 0;
    qcoh_manifest_free(m);
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_list() {
    for (std::size_t i = 0; i < qcoh_scenario_count(); ++i) std::printf("%s\n", qcoh_scenario_name(i));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcoh: open quantum system coherence scenarios"};
    app.set_version_flag("--version", std::string(qcoh_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::size_t workers = 0;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run a scenario and write its CSV and manifest");
    run->add_option("config", config_path, "configuration file (JSON)")->required();
    run->add_option("-w,--workers", workers, "trajectory worker threads (0: QCOH_WORKERS or hardware)");
    run->add_flag("-q,--quiet", quiet, "print failing checks only");

    auto* validate = app.add_subcommand("validate", "check a configuration and print it with defaults filled in");
    validate->add_option("config", config_path, "configuration file (JSON)")->required();

    app.add_subcommand("list-scenarios", "list the available scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*run) return cmd_run(config_path, workers, quiet);
    if (*validate) return cmd_validate(config_path);
    return cmd_list();
}
