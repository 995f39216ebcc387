/*
   Copyright 2026 The urnlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>

namespace urnlab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A stream is
// identified by (seed, stream); the i-th block of a stream is a pure function
// of (seed, stream, i), so any trajectory can be regenerated in isolation.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    Block block(std::uint64_t index) const noexcept
    {
        return rounds({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                      key_[0], key_[1]);
    }

    static Block rounds(Block ctr, std::uint32_t k0, std::uint32_t k1) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
};

// Uniform doubles in [0, 1) with 53 random bits, two per Philox block.
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed, stream) {}

    double next() noexcept
    {
        if (slot_ == 2) {
            buf_ = gen_.block(counter_++);
            slot_ = 0;
        }
        const std::uint64_t hi = buf_[2 * slot_ + 1];
        const std::uint64_t lo = buf_[2 * slot_];
        ++slot_;
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    std::uint64_t consumed() const noexcept { return 2 * counter_ - (2 - slot_); }

private:
    Philox4x32 gen_;
    Philox4x32::Block buf_{};
    std::uint64_t counter_ = 0;
    int slot_ = 2;
};

} // namespace urnlab
