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

// Counter-based uniform stream. Every draw is a pure function of
// (seed, stream, counter), so any stream position can be reproduced in any
// language without replaying the stream:
//
//   key     = mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909))
//   word_k  = mix64(key + (k + 1) * 0x9e3779b97f4a7c15)     (mod 2^64)
//   u_k     = (word_k >> 11) * 2^-53                         in [0, 1)
//
// mix64 is the SplitMix64 finalizer:
//   z ^= z >> 30; z *= 0xbf58476d1ce4e5b9;
//   z ^= z >> 27; z *= 0x94d049bb133111eb;
//   z ^= z >> 31.

#include <cstdint>

namespace qcoh {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ULL))) {}

    /// u_counter; does not advance the stream.
    constexpr double at(std::uint64_t counter) const noexcept {
        const std::uint64_t w = mix64(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
        return static_cast<double>(w >> 11) * 0x1.0p-53;
    }

    /// Next uniform in [0, 1).
    constexpr double uniform() noexcept { return at(counter_++); }

    constexpr std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qcoh
