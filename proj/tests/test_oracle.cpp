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
#include <map>

#include "support.hpp"
#include "urnlab/error.hpp"
#include "urnlab/laws.hpp"
#include "urnlab/oracle.hpp"

using namespace urnlab;
using urntest::Engine;

namespace {

// Independent brute force: walk every draw sequence, no merging along the way.
void enumerate(const ReplacementSpec& spec, const Vector& c, double prob, unsigned left,
               std::map<std::vector<long long>, double>& out)
{
    if (left == 0) {
        std::vector<long long> key;
        for (double x : c) {
            key.push_back(std::llround(x * 1e9));
        }
        out[key] += prob;
        return;
    }
    double total = 0.0;
    for (double x : c) {
        total += x;
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0.0) {
            continue;
        }
        Vector child = c;
        for (std::size_t j = 0; j < c.size(); ++j) {
            child[j] += spec.replacement()(i, j);
        }
        enumerate(spec, child, prob * c[i] / total, left - 1, out);
    }
}

Matrix dyadic_stochastic(Engine& g, std::size_t k)
{
    Matrix r(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        int left = 8;
        for (std::size_t j = 0; j + 1 < k; ++j) {
            const int take = std::uniform_int_distribution<int>(0, left)(g);
            r(i, j) = take / 8.0;
            left -= take;
        }
        r(i, k - 1) = left / 8.0;
    }
    return r;
}

ReplacementSpec jordan_reference()
{
    return urntest::make(urntest::three_two_dominant(0.5, urntest::block(0.25, 0.25), {0.9, 0.1}), {0.4, 0.3, 0.3});
}

} // namespace

TEST_CASE("one-step law of the triangular urn")
{
    const auto spec = urntest::make(urntest::two_triangular(0.5), {0.5, 0.5});
    const auto law = oracle::exact_distribution(spec, 1);
    REQUIRE(law.size() == 2);
    CHECK(law[0].composition == Vector{0.5, 1.5});
    CHECK(law[0].prob == 0.5);
    CHECK(law[1].composition == Vector{1.0, 1.0});
    CHECK(law[1].prob == 0.5);
    const Vector w{1.0, 0.0};
    CHECK(oracle::exact_mean_linear(spec, w, 0.5, 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(oracle::exact_mean_linear(spec, w, 0.5, 2) == doctest::Approx(0.9375).epsilon(1e-15));
    CHECK_THROWS_AS(oracle::exact_mean_linear(spec, Vector{1.0, 1.0}, 0.5, 2), Error);
}

TEST_CASE("property: exact law matches brute-force enumeration")
{
    Engine g(8);
    for (int trial = 0; trial < 30; ++trial) {
        CAPTURE(trial);
        const std::size_t k = 2 + trial % 3;
        const unsigned n = 1 + trial % 6;
        const auto spec = urntest::make(dyadic_stochastic(g, k), urntest::uniform_c0(k));
        std::map<std::vector<long long>, double> brute;
        enumerate(spec, spec.initial(), 1.0, n, brute);
        const auto law = oracle::exact_distribution(spec, n);
        CHECK(law.size() == brute.size());
        double total = 0.0;
        for (const auto& atom : law) {
            std::vector<long long> key;
            for (double x : atom.composition) {
                key.push_back(std::llround(x * 1e9));
            }
            REQUIRE(brute.count(key) == 1);
            CHECK(atom.prob == doctest::Approx(brute[key]).epsilon(1e-12));
            total += atom.prob;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("property: eigen-tracks have mean Pi_n(a) C0 v")
{
    Engine g(99);
    for (int trial = 0; trial < 24; ++trial) {
        CAPTURE(trial);
        const double s = urntest::dyadic(g, 2, 6, 8);
        Matrix r;
        switch (trial % 4) {
        case 0: r = urntest::block(urntest::dyadic(g, 1, 7, 8), urntest::dyadic(g, 1, 7, 8)); break;
        case 1: r = urntest::three_one_dominant(s, urntest::block(urntest::dyadic(g, 1, 7, 8), 0.5)); break;
        case 2:
            r = urntest::three_two_dominant(s, urntest::block(urntest::dyadic(g, 1, 7, 8), 0.25), {0.75, 0.25});
            break;
        case 3:
            r = urntest::four_block(s, urntest::block(0.25, 0.5), Matrix{{(1 - s) / 2, (1 - s) / 2}, {1 - s, 0.0}},
                                    urntest::block(urntest::dyadic(g, 1, 7, 8), 0.375));
            break;
        }
        const auto spec = urntest::make(r, urntest::probability(g, r.rows()));
        const auto cls = classify(spec);
        REQUIRE(cls.family != Family::Unsupported);
        for (const auto& e : cls.eigenpairs) {
            for (unsigned n = 0; n <= 8; ++n) {
                const double want = pi_n(e.value, n) * dot(spec.initial(), e.vector);
                CHECK(std::abs(oracle::exact_mean_linear(spec, e.vector, e.value, n) - want) < 1e-10);
            }
        }
        if (!is_jordan(cls.family)) {
            CHECK(oracle::exact_conditional_variance_check(spec, cls, 7) < 1e-10);
        }
    }
}

TEST_CASE("compensated martingale on the Jordan reference")
{
    const auto spec = jordan_reference();
    const auto cls = classify(spec);
    REQUIRE(cls.family == Family::ThreeTwoDominantJordan);
    for (unsigned n = 1; n <= 6; ++n) {
        CHECK(oracle::compensated_martingale_check(spec, cls, n) < 1e-10);
    }
    const Vector t1 = cls.jordan->T.column(0);
    Vector t2 = cls.jordan->T.column(1);
    // the compensator sum has to start at j = 0
    CHECK(oracle::compensated_martingale_check(spec, t1, t2, 0.5, 6, 1) > 1e-5);
    t2[1] += 1e-3;
    CHECK(oracle::compensated_martingale_check(spec, t1, t2, 0.5, 6) > 1e-5);
    CHECK_THROWS_AS(oracle::exact_conditional_variance_check(spec, cls, 4), Error);
}

TEST_CASE("property: compensated martingale for generated Jordan urns")
{
    Engine g(123);
    for (int trial = 0; trial < 16; ++trial) {
        CAPTURE(trial);
        const double s = urntest::uniform(g, 0.2, 0.8);
        Matrix r;
        if (trial % 2 == 0) {
            const double a = urntest::uniform(g, 0.1, 0.9) * (1.0 - s);
            const double m = urntest::uniform(g, 0.1, 0.9);
            r = urntest::three_two_dominant(s, urntest::block(a, 1.0 - s - a), {m, 1.0 - m});
        } else {
            const Matrix q = urntest::random_block(g);
            const double beta = s * (1.0 - q(0, 1) - q(1, 0));
            const double total = 1.0 - beta;
            const double a = urntest::uniform(g, std::max(0.05, total - 0.95), std::min(0.95, total - 0.05));
            r = urntest::four_block(s, q, urntest::random_e(g, s), urntest::block(a, total - a));
        }
        const auto spec = urntest::make(r, urntest::probability(g, r.rows()));
        const auto cls = classify(spec);
        REQUIRE(is_jordan(cls.family));
        CHECK(oracle::compensated_martingale_check(spec, cls, 6) < 1e-10);
    }
}

TEST_CASE("evolution identity of the one-dominant urn")
{
    const auto spec = urntest::make(urntest::three_one_dominant(0.5, urntest::block(0.35, 0.35)), {0.1, 0.1, 0.8});
    const auto cls = classify(spec);
    CHECK(oracle::evolution_identity_check(spec, cls, 6) < 1e-12);
    const auto other = urntest::make(urntest::two_triangular(0.5), {0.5, 0.5});
    CHECK_THROWS_AS(oracle::evolution_identity_check(other, classify(other), 3), Error);
}

TEST_CASE("enumeration guards")
{
    const auto spec = urntest::make(urntest::two_triangular(0.5), {0.5, 0.5});
    CHECK_THROWS_AS(oracle::exact_distribution(spec, oracle::kMaxDistributionSteps + 1), Error);
    const auto five = urntest::make(Matrix(5, 5, 0.2), urntest::uniform_c0(5));
    try {
        oracle::exact_distribution(five, 2);
        FAIL("expected a resource error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Resource);
    }
}

TEST_CASE("total variation")
{
    const std::vector<oracle::OutcomeAtom> law{{{1.0, 1.0}, 0.5}, {{0.5, 1.5}, 0.5}};
    CHECK(oracle::total_variation(law, {{1.0, 1.0}, {0.5, 1.5}}) == doctest::Approx(0.0));
    CHECK(oracle::total_variation(law, {{1.0, 1.0}, {1.0, 1.0}}) == doctest::Approx(0.5));
    // a composition outside the support counts in full
    CHECK(oracle::total_variation(law, {{1.0, 1.0}, {2.0, 0.0}}) == doctest::Approx(0.5));
}
