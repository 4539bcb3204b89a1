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

#include "qcoh/qcoh.h"

#include "qcoh/coherence.hpp"
#include "qcoh/errors.hpp"
#include "qcoh/models.hpp"
#include "qcoh/scenario.hpp"
#include "qcoh/trajectory.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

struct qcoh_config {
    qcoh::ScenarioConfig cfg;
};

struct qcoh_manifest {
    qcoh::RunResult result;
};

struct qcoh_model {
    qcoh::LindbladModel model;
};

struct qcoh_trajectory {
    qcoh::TrajectoryRecord rec;
};

namespace {

thread_local std::string g_last_error;

qcoh_status status_of(qcoh::ErrorKind kind) {
    using qcoh::ErrorKind;
    switch (kind) {
        case ErrorKind::Shape: return QCOH_ERR_SHAPE;
        case ErrorKind::Domain: return QCOH_ERR_DOMAIN;
        case ErrorKind::Model: return QCOH_ERR_MODEL;
        case ErrorKind::Integration: return QCOH_ERR_INTEGRATION;
        case ErrorKind::Configuration: return QCOH_ERR_CONFIGURATION;
        case ErrorKind::Truncation: return QCOH_ERR_TRUNCATION;
        case ErrorKind::Numerical: return QCOH_ERR_NUMERICAL;
        case ErrorKind::UndefinedTimescale: return QCOH_ERR_UNDEFINED_TIMESCALE;
        case ErrorKind::Validation: return QCOH_ERR_VALIDATION;
        case ErrorKind::Io: return QCOH_ERR_IO;
    }
    return QCOH_ERR_INTERNAL;
}

qcoh_status set_error(qcoh_status s, const char* what) {
    g_last_error = what;
    return s;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

qcoh::ComplexMatrix read_matrix(const double* data, std::size_t dim) {
    qcoh::ComplexMatrix m(static_cast<qcoh::Index>(dim), static_cast<qcoh::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t k = 2 * (i * dim + j);
            m(static_cast<qcoh::Index>(i), static_cast<qcoh::Index>(j)) = qcoh::Complex(data[k], data[k + 1]);
        }
    return m;
}

qcoh::QuantumState read_ket(const double* data, std::size_t dim) {
    qcoh::ComplexVector v(static_cast<qcoh::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) v(static_cast<qcoh::Index>(i)) = qcoh::Complex(data[2 * i], data[2 * i + 1]);
    return qcoh::QuantumState::pure(std::move(v));
}

template <class F>
qcoh_status call(F&& f) {
    try {
        f();
        g_last_error.clear();
        return QCOH_OK;
    } catch (const std::invalid_argument& e) {
        return set_error(QCOH_ERR_INVALID_ARGUMENT, e.what());
    } catch (const qcoh::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(QCOH_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(QCOH_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(QCOH_ERR_INTERNAL, "unknown error");
    }
}

}  // namespace

extern "C" {

const char* qcoh_version(void) { return qcoh::kVersion; }

const char* qcoh_status_name(qcoh_status status) {
    switch (status) {
        case QCOH_OK: return "ok";
        case QCOH_ERR_SHAPE: return "shape";
        case QCOH_ERR_DOMAIN: return "domain";
        case QCOH_ERR_MODEL: return "model";
        case QCOH_ERR_INTEGRATION: return "integration";
        case QCOH_ERR_CONFIGURATION: return "configuration";
        case QCOH_ERR_TRUNCATION: return "truncation";
        case QCOH_ERR_NUMERICAL: return "numerical";
        case QCOH_ERR_UNDEFINED_TIMESCALE: return "undefined-timescale";
        case QCOH_ERR_VALIDATION: return "validation";
        case QCOH_ERR_IO: return "io";
        case QCOH_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case QCOH_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* qcoh_last_error(void) { return g_last_error.c_str(); }

void qcoh_string_free(char* s) { std::free(s); }

size_t qcoh_scenario_count(void) { return qcoh::scenario_names().size(); }

const char* qcoh_scenario_name(size_t i) {
    const auto& names = qcoh::scenario_names();
    return i < names.size() ? names[i].c_str() : nullptr;
}

qcoh_status qcoh_config_parse(const char* text, size_t len, qcoh_config** out) {
    return call([&] {
        require(out != nullptr && (text != nullptr || len == 0), "qcoh_config_parse: null argument");
        *out = nullptr;
        auto cfg = qcoh::parse_config(std::string_view(text == nullptr ? "" : text, len));
        *out = new qcoh_config{std::move(cfg)};
    });
}

qcoh_status qcoh_config_load(const char* path, qcoh_config** out) {
    return call([&] {
        require(out != nullptr && path != nullptr, "qcoh_config_load: null argument");
        *out = nullptr;
        *out = new qcoh_config{qcoh::load_config(path)};
    });
}

void qcoh_config_free(qcoh_config* config) { delete config; }

qcoh_status qcoh_config_emit(const qcoh_config* config, char** out) {
    return call([&] {
        require(config != nullptr && out != nullptr, "qcoh_config_emit: null argument");
        *out = dup_string(qcoh::emit_config(config->cfg));
    });
}

const char* qcoh_config_scenario(const qcoh_config* config) {
    return config == nullptr ? nullptr : config->cfg.scenario.c_str();
}

const char* qcoh_config_output_path(const qcoh_config* config) {
    return config == nullptr ? nullptr : config->cfg.output.path.c_str();
}

const char* qcoh_config_manifest_path(const qcoh_config* config) {
    return config == nullptr ? nullptr : config->cfg.output.manifest.c_str();
}

qcoh_status qcoh_config_check_paths(const qcoh_config* config) {
    return call([&] {
        require(config != nullptr, "qcoh_config_check_paths: null argument");
        qcoh::check_output_paths(config->cfg);
    });
}

qcoh_status qcoh_run(const qcoh_config* config, int write_files, size_t workers, qcoh_manifest** out) {
    return call([&] {
        require(config != nullptr && out != nullptr, "qcoh_run: null argument");
        *out = nullptr;
        if (write_files) qcoh::check_output_paths(config->cfg);
        auto m = std::make_unique<qcoh_manifest>(qcoh_manifest{qcoh::run_scenario(config->cfg, workers)});
        if (write_files) qcoh::write_outputs(m->result);
        *out = m.release();
    });
}

void qcoh_manifest_free(qcoh_manifest* manifest) { delete manifest; }

int qcoh_manifest_passed(const qcoh_manifest* manifest) {
    return manifest != nullptr && manifest->result.manifest.passed() ? 1 : 0;
}

size_t qcoh_manifest_check_count(const qcoh_manifest* manifest) {
    return manifest == nullptr ? 0 : manifest->result.manifest.checks.size();
}

qcoh_status qcoh_manifest_check(const qcoh_manifest* manifest, size_t i, const char** name, int* passed,
                                double* value, double* threshold) {
    return call([&] {
        require(manifest != nullptr, "qcoh_manifest_check: null manifest");
        const auto& checks = manifest->result.manifest.checks;
        require(i < checks.size(), "qcoh_manifest_check: index out of range");
        const auto& c = checks[i];
        if (name) *name = c.name.c_str();
        if (passed) *passed = c.passed ? 1 : 0;
        if (value) *value = c.value;
        if (threshold) *threshold = c.threshold;
    });
}

size_t qcoh_manifest_warning_count(const qcoh_manifest* manifest) {
    return manifest == nullptr ? 0 : manifest->result.manifest.warnings.size();
}

const char* qcoh_manifest_warning(const qcoh_manifest* manifest, size_t i) {
    if (manifest == nullptr || i >= manifest->result.manifest.warnings.size()) return nullptr;
    return manifest->result.manifest.warnings[i].c_str();
}

double qcoh_manifest_wall_time(const qcoh_manifest* manifest) {
    return manifest == nullptr ? 0.0 : manifest->result.manifest.wall_time_s;
}

qcoh_status qcoh_manifest_to_json(const qcoh_manifest* manifest, char** out) {
    return call([&] {
        require(manifest != nullptr && out != nullptr, "qcoh_manifest_to_json: null argument");
        *out = dup_string(manifest->result.manifest.to_json().dump(2) + "\n");
    });
}

size_t qcoh_manifest_file_count(const qcoh_manifest* manifest) {
    return manifest == nullptr ? 0 : manifest->result.files.size();
}

qcoh_status qcoh_manifest_file(const qcoh_manifest* manifest, size_t i, const char** path, const char** contents) {
    return call([&] {
        require(manifest != nullptr, "qcoh_manifest_file: null manifest");
        require(i < manifest->result.files.size(), "qcoh_manifest_file: index out of range");
        if (path) *path = manifest->result.files[i].first.c_str();
        if (contents) *contents = manifest->result.files[i].second.c_str();
    });
}

qcoh_status qcoh_model_create(size_t dim, const double* hamiltonian, size_t n_channels, const double* ops,
                              const double* rates, qcoh_model** out) {
    return call([&] {
        require(out != nullptr && hamiltonian != nullptr && dim > 0, "qcoh_model_create: null argument");
        require(n_channels == 0 || (ops != nullptr && rates != nullptr), "qcoh_model_create: null channel data");
        *out = nullptr;
        std::vector<qcoh::Channel> channels;
        for (std::size_t j = 0; j < n_channels; ++j)
            channels.push_back({read_matrix(ops + 2 * dim * dim * j, dim), rates[j]});
        *out = new qcoh_model{qcoh::LindbladModel(read_matrix(hamiltonian, dim), std::move(channels))};
    });
}

void qcoh_model_free(qcoh_model* model) { delete model; }

size_t qcoh_model_dim(const qcoh_model* model) {
    return model == nullptr ? 0 : static_cast<size_t>(model->model.dim());
}

qcoh_status qcoh_unraveling_max_trace_distance(const qcoh_model* model, const double* psi0, double t_start,
                                               double t_end, size_t n_steps, size_t sample_every, size_t n_traj,
                                               uint64_t seed, size_t workers, double* out) {
    return call([&] {
        require(model != nullptr && psi0 != nullptr && out != nullptr, "qcoh_unraveling_max_trace_distance: null argument");
        const auto dim = static_cast<std::size_t>(model->model.dim());
        const qcoh::TimeGrid grid{t_start, t_end, n_steps, sample_every};
        const auto rep = qcoh::unraveling_equivalence_report(model->model, read_ket(psi0, dim), grid, n_traj, seed,
                                                             workers);
        *out = rep.max_trace_distance;
    });
}

qcoh_status qcoh_trajectory_run(const qcoh_model* model, const double* psi0, double t_start, double t_end,
                                size_t n_steps, size_t sample_every, uint64_t seed, uint64_t index,
                                qcoh_trajectory** out) {
    return call([&] {
        require(model != nullptr && psi0 != nullptr && out != nullptr, "qcoh_trajectory_run: null argument");
        *out = nullptr;
        const auto dim = static_cast<std::size_t>(model->model.dim());
        const qcoh::TimeGrid grid{t_start, t_end, n_steps, sample_every};
        *out = new qcoh_trajectory{qcoh::run_trajectory(read_ket(psi0, dim), model->model, grid, seed, index)};
    });
}

qcoh_status qcoh_trajectory_parse(const char* text, size_t len, qcoh_trajectory** out) {
    return call([&] {
        require(out != nullptr && (text != nullptr || len == 0), "qcoh_trajectory_parse: null argument");
        *out = nullptr;
        *out = new qcoh_trajectory{qcoh::parse_trajectory(std::string_view(text == nullptr ? "" : text, len))};
    });
}

void qcoh_trajectory_free(qcoh_trajectory* traj) { delete traj; }

size_t qcoh_trajectory_jump_count(const qcoh_trajectory* traj) {
    return traj == nullptr ? 0 : traj->rec.jump_times.size();
}

qcoh_status qcoh_trajectory_jump(const qcoh_trajectory* traj, size_t i, double* time, size_t* channel) {
    return call([&] {
        require(traj != nullptr, "qcoh_trajectory_jump: null trajectory");
        require(i < traj->rec.jump_times.size(), "qcoh_trajectory_jump: index out of range");
        if (time) *time = traj->rec.jump_times[i];
        if (channel) *channel = traj->rec.jump_channels[i];
    });
}

qcoh_status qcoh_trajectory_serialize(const qcoh_trajectory* traj, char** out) {
    return call([&] {
        require(traj != nullptr && out != nullptr, "qcoh_trajectory_serialize: null argument");
        *out = dup_string(qcoh::serialize_trajectory(traj->rec));
    });
}

qcoh_status qcoh_purity(size_t dim, const double* rho, double* out) {
    return call([&] {
        require(rho != nullptr && out != nullptr && dim > 0, "qcoh_purity: null argument");
        *out = qcoh::purity(qcoh::QuantumState::mixed(read_matrix(rho, dim)));
    });
}

qcoh_status qcoh_central_spin_coherence(double omega0, const double* couplings, size_t m, const double c1[2],
                                        const double c2[2], double t, double out[2]) {
    return call([&] {
        require(couplings != nullptr || m == 0, "qcoh_central_spin_coherence: null couplings");
        require(c1 != nullptr && c2 != nullptr && out != nullptr, "qcoh_central_spin_coherence: null argument");
        qcoh::CentralSpinParams p;
        p.omega0 = omega0;
        p.couplings.assign(couplings, couplings + m);
        p.c1 = qcoh::Complex(c1[0], c1[1]);
        p.c2 = qcoh::Complex(c2[0], c2[1]);
        const auto c = qcoh::central_spin_coherence(p, t);
        out[0] = c.real();
        out[1] = c.imag();
    });
}

}  // extern "C"
