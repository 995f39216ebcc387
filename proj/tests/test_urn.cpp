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
#include <string>

#include "support.hpp"
#include "urnlab/error.hpp"
#include "urnlab/urn.hpp"

using namespace urnlab;
using urntest::Engine;

namespace {

ErrorCode code_of(auto&& body)
{
    try {
        body();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

std::string message_of(auto&& body)
{
    try {
        body();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("spec validation")
{
    const Matrix good{{0.7, 0.3}, {0.4, 0.6}};
    CHECK_NOTHROW(ReplacementSpec::make(good, {0.5, 0.5}));

    const auto neg = message_of([] { ReplacementSpec::make({{0.7, 0.3}, {-0.1, 1.1}}, {0.5, 0.5}); });
    CHECK(neg.find("R[1][0]") != std::string::npos);

    CHECK(code_of([] { ReplacementSpec::make({{0.7, 0.3}, {0.4, 0.7}}, {0.5, 0.5}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { ReplacementSpec::make({{1.0}}, {1.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ReplacementSpec::make(Matrix(2, 3, 0.5), {0.5, 0.5}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ReplacementSpec::make({{0.7, 0.3}, {0.4, 0.6}}, {0.5, 0.6}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { ReplacementSpec::make({{0.7, 0.3}, {0.4, 0.6}}, {0.5}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ReplacementSpec::make({{0.7, 0.3}, {0.4, 0.6}}, {1.5, -0.5}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { ReplacementSpec::make({{NAN, 0.3}, {0.4, 0.6}}, {0.5, 0.5}); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("common row sum is divided out")
{
    const auto spec = ReplacementSpec::make({{1.2, 0.8}, {2.0, 0.0}}, {0.5, 0.5});
    CHECK(spec.row_scale() == doctest::Approx(2.0));
    CHECK(spec.replacement()(0, 0) == doctest::Approx(0.6));
    CHECK(spec.replacement()(0, 1) == doctest::Approx(0.4));
    CHECK(spec.replacement()(1, 0) == doctest::Approx(1.0));
    CHECK(spec.replacement()(1, 1) == 0.0);
}

TEST_CASE("draw inverts the cumulative sum")
{
    const Vector c{0.2, 0.3, 0.5};
    CHECK(draw(c, 0.45) == 1);
    CHECK(draw(c, 0.0) == 0);
    CHECK(draw(c, 0.1999) == 0);
    CHECK(draw(c, 0.2) == 1);
    CHECK(draw(c, 0.5) == 2);
    CHECK(draw(c, 0.999999) == 2);
    CHECK(draw(Vector{0.0, 1.0, 0.0}, 0.0) == 1);
    CHECK(draw(Vector{0.0, 1.0, 0.0}, 0.999) == 1);
    CHECK(code_of([] { draw(Vector{0.0, 0.0}, 0.5); }) == ErrorCode::Domain);
}

TEST_CASE("step adds the drawn row")
{
    const auto spec = ReplacementSpec::make({{0.5, 0.5}, {0.0, 1.0}}, {0.5, 0.5});
    auto s = UrnState::initial(spec);
    s = step(spec, s, 0);
    CHECK(s.counts == Vector{1.0, 1.0});
    CHECK(s.n == 1);
    s = step(spec, s, 1);
    CHECK(s.counts == Vector{1.0, 2.0});
    CHECK(s.mass() == 3.0);
    CHECK(code_of([&] { step(spec, s, 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("checkpoints")
{
    CHECK(geometric_checkpoints(1000) ==
          std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1000});
    CHECK(geometric_checkpoints(1024).back() == 1024);
    const auto fine = geometric_checkpoints(1000, 4);
    CHECK(fine.size() > 30);
    CHECK(std::is_sorted(fine.begin(), fine.end()));
    CHECK(std::adjacent_find(fine.begin(), fine.end()) == fine.end());
    CHECK(fine.back() == 1000);
    CHECK_NOTHROW(validate_checkpoints(std::vector<std::uint64_t>{1, 5, 10}, 10));
    CHECK_THROWS_AS(validate_checkpoints(std::vector<std::uint64_t>{5, 1}, 10), Error);
    CHECK_THROWS_AS(validate_checkpoints(std::vector<std::uint64_t>{1, 11}, 10), Error);
    CHECK_THROWS_AS(validate_checkpoints(std::vector<std::uint64_t>{1, 1}, 10), Error);
}

TEST_CASE("simulation is deterministic per (seed, stream)")
{
    const auto spec = ReplacementSpec::make({{0.7, 0.3}, {0.4, 0.6}}, {0.5, 0.5});
    const std::vector<std::uint64_t> cps{10, 100, 1000};
    const std::vector<Vector> tracks{{0.75, -1.0}};
    const auto a = simulate(spec, 1000, 9, 4, cps, tracks);
    const auto b = simulate(spec, 1000, 9, 4, cps, tracks);
    const auto c = simulate(spec, 1000, 9, 5, cps, tracks);
    CHECK(a.states == b.states);
    CHECK(a.states != c.states);
    REQUIRE(a.tracks.size() == 1);
    for (std::size_t i = 0; i < cps.size(); ++i) {
        CHECK(a.tracks[0][i] == dot(a.states[i], tracks[0]));
    }
}

TEST_CASE("advance matches the one-draw-at-a-time reference loop bit for bit")
{
    Engine g(11);
    for (std::size_t k = 2; k <= 6; ++k) {
        Matrix r(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto row = urntest::probability(g, k);
            for (std::size_t j = 0; j < k; ++j) {
                r(i, j) = row[j];
            }
        }
        const auto spec = ReplacementSpec::make(r, urntest::probability(g, k));
        UniformStream fast_rng(3, k);
        UniformStream slow_rng(3, k);
        Vector fast = spec.initial();
        advance(spec, fast, 500, fast_rng);
        auto slow = UrnState::initial(spec);
        for (int i = 0; i < 500; ++i) {
            slow = step(spec, slow, draw(slow, slow_rng));
        }
        CAPTURE(k);
        CHECK(fast == slow.counts);
        CHECK(fast_rng.consumed() == 500);
    }
}

TEST_CASE("property: mass grows by one per draw and counts stay non-negative")
{
    Engine g(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + trial % 4;
        Matrix r(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            // sparse rows exercise empty colors
            const auto row = urntest::probability(g, k);
            for (std::size_t j = 0; j < k; ++j) {
                r(i, j) = (j == i || std::uniform_int_distribution<int>(0, 2)(g) > 0) ? row[j] : 0.0;
            }
            double total = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                total += r(i, j);
            }
            for (std::size_t j = 0; j < k; ++j) {
                r(i, j) /= total;
            }
        }
        auto c0 = urntest::probability(g, k);
        const auto spec = ReplacementSpec::make(r, c0);
        const std::vector<std::uint64_t> cps{1, 7, 50, 300};
        const auto tr = simulate(spec, 300, trial, 0, cps, {});
        for (std::size_t i = 0; i < cps.size(); ++i) {
            double mass = 0.0;
            for (double x : tr.states[i]) {
                CHECK(x >= 0.0);
                mass += x;
            }
            CAPTURE(trial);
            CHECK(std::abs(mass - (1.0 + static_cast<double>(cps[i]))) <= 1e-9 * static_cast<double>(cps[i]));
        }
    }
}

TEST_CASE("triangular urn never creates the first color from the second")
{
    const auto spec = ReplacementSpec::make(urntest::two_triangular(0.6), {0.5, 0.5});
    Vector counts = spec.initial();
    UniformStream rng(5, 0);
    Vector last = counts;
    for (int i = 0; i < 2000; ++i) {
        advance(spec, counts, 1, rng);
        const double dw = counts[0] - last[0];
        CHECK((dw == 0.0 || std::abs(dw - 0.6) < 1e-12));
        last = counts;
    }
}
