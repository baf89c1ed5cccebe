// Copyright 2026 The rydmetro Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file random.hpp
 * Seeded stream derivation. Every consumer of randomness asks for a stream
 * by (master seed, stream index, tag), so results do not depend on the
 * order in which shards are evaluated.
 */
#pragma once

#include <cstdint>
#include <random>

namespace rydmetro {

using Rng = std::mt19937_64;

enum class StreamTag : std::uint32_t {
    shots = 1,
    realization = 2,
    bootstrap = 3,
    readout_mc = 4,
};

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index,
                       StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32U),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32U),
                      static_cast<std::uint32_t>(tag)};
    return Rng(seq);
}

} // namespace rydmetro
