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
#include <random>

#include "urnlab/error.hpp"
#include "urnlab/stats.hpp"

using namespace urnlab;

namespace {

// Inverse of the standard normal CDF by bisection on erfc; slow but independent.
double normal_quantile(double p)
{
    double lo = -10.0;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// sup |F_emp - Phi| evaluated at every sample point and its left limit, O(n^2).
double brute_ks(const std::vector<double>& z)
{
    double d = 0.0;
    const double n = static_cast<double>(z.size());
    for (double x : z) {
        double below = 0.0;
        double at_or_below = 0.0;
        for (double y : z) {
            below += y < x;
            at_or_below += y <= x;
        }
        const double f = 0.5 * std::erfc(-x / std::sqrt(2.0));
        d = std::max({d, std::abs(at_or_below / n - f), std::abs(below / n - f)});
    }
    return d;
}

} // namespace

TEST_CASE("normal cdf reference values")
{
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(std::abs(normal_cdf(1.96) - 0.9750021048517795) < 1e-7);
    CHECK(std::abs(normal_cdf(-1.0) - 0.15865525393145707) < 1e-7);
    CHECK(std::abs(normal_cdf(-5.0) - 2.866515718791939e-07) < 1e-12);
}

TEST_CASE("Kolmogorov tail")
{
    CHECK(kolmogorov_tail(0.1) == 1.0);
    CHECK(kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_tail(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_tail(5.0) < 1e-20);
}

TEST_CASE("KS examples")
{
    std::vector<double> q(1000);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = normal_quantile((static_cast<double>(i) + 0.5) / 1000.0);
    }
    CHECK(ks_standard_normal(q).statistic <= 2e-3);

    CHECK(ks_standard_normal(std::vector<double>(100, 0.0)).statistic == doctest::Approx(0.5));

    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> flat(10000);
    for (auto& x : flat) {
        x = u(g);
    }
    CHECK(ks_standard_normal(flat).p_value < 0.01);

    CHECK_THROWS_AS(ks_standard_normal(std::vector<double>(49, 0.0)), Error);
    std::vector<double> with_nan(60, 0.0);
    with_nan[3] = NAN;
    CHECK(ks_standard_normal(with_nan).size == 59);
}

TEST_CASE("property: KS statistic equals the brute-force supremum")
{
    std::mt19937_64 g(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::normal_distribution<double> nd(0.1 * (trial % 5), 1.0 + 0.1 * (trial % 3));
        std::vector<double> z(50 + 37 * trial);
        for (auto& x : z) {
            x = nd(g);
        }
        // ties exercise the left limits
        if (trial % 4 == 0) {
            z[1] = z[0];
            z[2] = z[0];
        }
        const auto r = ks_standard_normal(z);
        CHECK(r.statistic == doctest::Approx(brute_ks(z)).epsilon(1e-12));
        CHECK(r.statistic >= 0.0);
        CHECK(r.statistic <= 1.0);
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("property: KS p-values are roughly uniform under the null")
{
    std::mt19937_64 g(5);
    std::normal_distribution<double> nd;
    int rejected = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> z(500);
        for (auto& x : z) {
            x = nd(g);
        }
        rejected += ks_standard_normal(z).p_value < 0.05;
    }
    // binomial(400, 0.05): mean 20, sd 4.4
    CHECK(rejected > 5);
    CHECK(rejected < 40);
}

TEST_CASE("two-sample KS")
{
    std::mt19937_64 g(9);
    std::normal_distribution<double> nd;
    std::vector<double> a(2000);
    std::vector<double> b(3000);
    for (auto& x : a) {
        x = nd(g);
    }
    for (auto& x : b) {
        x = nd(g);
    }
    CHECK(ks_two_sample(a, a).statistic == 0.0);
    CHECK(ks_two_sample(a, b).p_value > 0.001);
    for (auto& x : b) {
        x += 0.3;
    }
    CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("moments and median")
{
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(x) == 2.5);
    CHECK(variance(x) == doctest::Approx(5.0 / 3.0));
    CHECK(median(x) == 2.5);
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK_THROWS_AS(mean(std::vector<double>{}), Error);
    CHECK_THROWS_AS(variance(std::vector<double>{1.0}), Error);
}
