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

#include <doctest.h>

#include <cmath>
#include <set>

#include "urnlab/rng.hpp"

using urnlab::Philox4x32;
using urnlab::UniformStream;

TEST_CASE("philox4x32-10 known answers")
{
    using B = Philox4x32::Block;
    CHECK(Philox4x32::rounds(B{0, 0, 0, 0}, 0, 0) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::rounds(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, 0xffffffff, 0xffffffff) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::rounds(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, 0xa4093822, 0x299f31d0) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter layout: block index low, stream high, seed as key")
{
    const Philox4x32 g(0x0123456789abcdefULL, 0xfedcba9876543210ULL);
    const auto b = g.block(0x1111222233334444ULL);
    const auto expect = Philox4x32::rounds({0x33334444, 0x11112222, 0x76543210, 0xfedcba98}, 0x89abcdef, 0x01234567);
    CHECK(b == expect);
}

TEST_CASE("uniform stream is in [0, 1), reproducible and stream-separated")
{
    UniformStream a(42, 0);
    UniformStream b(42, 0);
    UniformStream c(42, 1);
    UniformStream d(43, 0);
    double sum = 0.0;
    int differ_stream = 0;
    int differ_seed = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = a.next();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        CHECK(x == b.next());
        differ_stream += x != c.next();
        differ_seed += x != d.next();
        sum += x;
    }
    CHECK(differ_stream == n);
    CHECK(differ_seed == n);
    // mean of n uniforms: sd = 1 / sqrt(12 n) ~ 6.5e-4
    CHECK(std::abs(sum / n - 0.5) < 5 * 6.5e-4);
    CHECK(a.consumed() == static_cast<std::uint64_t>(n));
}

TEST_CASE("uniform stream uses the 53 high bits of two words per draw")
{
    UniformStream s(7, 3);
    const auto blk = Philox4x32(7, 3).block(0);
    const double first = static_cast<double>(((std::uint64_t{blk[1]} << 32) | blk[0]) >> 11) * 0x1.0p-53;
    const double second = static_cast<double>(((std::uint64_t{blk[3]} << 32) | blk[2]) >> 11) * 0x1.0p-53;
    CHECK(s.next() == first);
    CHECK(s.consumed() == 1);
    CHECK(s.next() == second);
    const auto next = Philox4x32(7, 3).block(1);
    CHECK(s.next() == static_cast<double>(((std::uint64_t{next[1]} << 32) | next[0]) >> 11) * 0x1.0p-53);
}

TEST_CASE("low-order bits are balanced across many streams")
{
    // Each of the 53 bits of the first draw of 4096 streams should be set about half the time.
    std::set<double> seen;
    int ones[53] = {};
    const int streams = 4096;
    for (int t = 0; t < streams; ++t) {
        UniformStream s(1, t);
        const double x = s.next();
        seen.insert(x);
        const auto bits = static_cast<std::uint64_t>(x * 0x1.0p53);
        for (int k = 0; k < 53; ++k) {
            ones[k] += (bits >> k) & 1;
        }
    }
    CHECK(seen.size() == static_cast<std::size_t>(streams));
    for (int k = 0; k < 53; ++k) {
        // binomial(4096, 1/2): sd = 32
        CHECK(std::abs(ones[k] - streams / 2) < 6 * 32);
    }
}
