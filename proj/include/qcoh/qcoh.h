/* Copyright 2026 The qcoh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QCOH_QCOH_H_
#define QCOH_QCOH_H_

/* C interface to the qcoh toolkit.
 *
 * Every fallible call returns a qcoh_status. On failure the message of the
 * most recent error on the calling thread is available from qcoh_last_error().
 * Handles are opaque and released with the matching *_free function. Strings
 * returned through char** out-parameters are released with qcoh_string_free.
 *
 * Complex arrays are interleaved (re, im) doubles; matrices are row-major.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QCOH_BUILDING)
#    define QCOH_API __declspec(dllexport)
#  else
#    define QCOH_API __declspec(dllimport)
#  endif
#else
#  define QCOH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qcoh_status {
  QCOH_OK = 0,
  QCOH_ERR_SHAPE = 1,
  QCOH_ERR_DOMAIN = 2,
  QCOH_ERR_MODEL = 3,
  QCOH_ERR_INTEGRATION = 4,
  QCOH_ERR_CONFIGURATION = 5,
  QCOH_ERR_TRUNCATION = 6,
  QCOH_ERR_NUMERICAL = 7,
  QCOH_ERR_UNDEFINED_TIMESCALE = 8,
  QCOH_ERR_VALIDATION = 9,
  QCOH_ERR_IO = 10,
  QCOH_ERR_INVALID_ARGUMENT = 11,
  QCOH_ERR_INTERNAL = 12
} qcoh_status;

typedef struct qcoh_config qcoh_config;
typedef struct qcoh_manifest qcoh_manifest;
typedef struct qcoh_model qcoh_model;
typedef struct qcoh_trajectory qcoh_trajectory;

QCOH_API const char* qcoh_version(void);
QCOH_API const char* qcoh_status_name(qcoh_status status);
/* Message of the last failed call on this thread; "" if none. */
QCOH_API const char* qcoh_last_error(void);
QCOH_API void qcoh_string_free(char* s);

/* ---- scenarios ---------------------------------------------------------- */

QCOH_API size_t qcoh_scenario_count(void);
/* NULL when i is out of range. */
QCOH_API const char* qcoh_scenario_name(size_t i);

QCOH_API qcoh_status qcoh_config_parse(const char* text, size_t len, qcoh_config** out);
QCOH_API qcoh_status qcoh_config_load(const char* path, qcoh_config** out);
QCOH_API void qcoh_config_free(qcoh_config* config);
/* Normalized document with defaults filled in. */
QCOH_API qcoh_status qcoh_config_emit(const qcoh_config* config, char** out);
QCOH_API const char* qcoh_config_scenario(const qcoh_config* config);
QCOH_API const char* qcoh_config_output_path(const qcoh_config* config);
QCOH_API const char* qcoh_config_manifest_path(const qcoh_config* config);
/* QCOH_ERR_IO if an output file could not be created. */
QCOH_API qcoh_status qcoh_config_check_paths(const qcoh_config* config);

/* Runs the scenario. When write_files is nonzero the CSV outputs and the
 * manifest are written to the configured paths. workers = 0 selects the
 * default (QCOH_WORKERS or the hardware concurrency). */
QCOH_API qcoh_status qcoh_run(const qcoh_config* config, int write_files, size_t workers, qcoh_manifest** out);
QCOH_API void qcoh_manifest_free(qcoh_manifest* manifest);
/* 1 if every check passed. */
QCOH_API int qcoh_manifest_passed(const qcoh_manifest* manifest);
QCOH_API size_t qcoh_manifest_check_count(const qcoh_manifest* manifest);
QCOH_API qcoh_status qcoh_manifest_check(const qcoh_manifest* manifest, size_t i, const char** name, int* passed,
                                         double* value, double* threshold);
QCOH_API size_t qcoh_manifest_warning_count(const qcoh_manifest* manifest);
QCOH_API const char* qcoh_manifest_warning(const qcoh_manifest* manifest, size_t i);
QCOH_API double qcoh_manifest_wall_time(const qcoh_manifest* manifest);
QCOH_API qcoh_status qcoh_manifest_to_json(const qcoh_manifest* manifest, char** out);
/* Contents of output file i (in the order listed by the manifest). */
QCOH_API size_t qcoh_manifest_file_count(const qcoh_manifest* manifest);
QCOH_API qcoh_status qcoh_manifest_file(const qcoh_manifest* manifest, size_t i, const char** path,
                                        const char** contents);

/* ---- models and trajectories -------------------------------------------- */

/* H is dim x dim; ops holds n_channels dim x dim jump operators back to back. */
QCOH_API qcoh_status qcoh_model_create(size_t dim, const double* hamiltonian, size_t n_channels, const double* ops,
                                       const double* rates, qcoh_model** out);
QCOH_API void qcoh_model_free(qcoh_model* model);
QCOH_API size_t qcoh_model_dim(const qcoh_model* model);

/* Trace distance between the trajectory average and the master equation,
 * maximized over the sample times. */
QCOH_API qcoh_status qcoh_unraveling_max_trace_distance(const qcoh_model* model, const double* psi0, double t_start,
                                                        double t_end, size_t n_steps, size_t sample_every,
                                                        size_t n_traj, uint64_t seed, size_t workers,
                                                        double* out);

QCOH_API qcoh_status qcoh_trajectory_run(const qcoh_model* model, const double* psi0, double t_start, double t_end,
                                         size_t n_steps, size_t sample_every, uint64_t seed, uint64_t index,
                                         qcoh_trajectory** out);
QCOH_API qcoh_status qcoh_trajectory_parse(const char* text, size_t len, qcoh_trajectory** out);
QCOH_API void qcoh_trajectory_free(qcoh_trajectory* traj);
QCOH_API size_t qcoh_trajectory_jump_count(const qcoh_trajectory* traj);
QCOH_API qcoh_status qcoh_trajectory_jump(const qcoh_trajectory* traj, size_t i, double* time, size_t* channel);
QCOH_API qcoh_status qcoh_trajectory_serialize(const qcoh_trajectory* traj, char** out);

/* ---- small numerical helpers -------------------------------------------- */

/* tr(rho^2) of a dim x dim density matrix; QCOH_ERR_DOMAIN if rho is not a state. */
QCOH_API qcoh_status qcoh_purity(size_t dim, const double* rho, double* out);

/* Closed-form central-spin coherence <up|rho_S(t)|down>. */
QCOH_API qcoh_status qcoh_central_spin_coherence(double omega0, const double* couplings, size_t m, const double c1[2],
                                                 const double c2[2], double t, double out[2]);

#ifdef __cplusplus
}
#endif

#endif /* QCOH_QCOH_H_ */
