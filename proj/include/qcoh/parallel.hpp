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

#include <cstddef>
#include <functional>

namespace qcoh {

/// Environment variable overriding the worker count.
inline constexpr const char* kWorkersEnv = "QCOH_WORKERS";

/// `requested` if positive, else $QCOH_WORKERS if set and positive, else the
/// hardware concurrency (at least 1).
std::size_t resolve_workers(std::size_t requested = 0);

/// Calls body(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace qcoh
