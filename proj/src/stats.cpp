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

#include "urnlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "urnlab/error.hpp"

namespace urnlab {

namespace {

constexpr std::size_t kMinKsSample = 50;

std::vector<double> finite_sorted(std::span<const double> x)
{
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) {
        if (std::isfinite(v)) {
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double stephens_p(double d, double effective_n)
{
    const double root = std::sqrt(effective_n);
    return kolmogorov_tail((root + 0.12 + 0.11 / root) * d);
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_tail(double t)
{
    if (t < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += sign * term;
        if (term < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_standard_normal(std::span<const double> sample)
{
    const auto z = finite_sorted(sample);
    if (z.size() < kMinKsSample) {
        fail(ErrorCode::InvalidArgument, "KS test needs at least 50 finite values, got " + std::to_string(z.size()));
    }
    const double m = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return {d, stephens_p(d, m), z.size()};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    const auto x = finite_sorted(a);
    const auto y = finite_sorted(b);
    if (x.size() < kMinKsSample || y.size() < kMinKsSample) {
        fail(ErrorCode::InvalidArgument, "two-sample KS needs at least 50 values per sample");
    }
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) {
            ++i;
        }
        while (j < y.size() && y[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return {d, stephens_p(d, nx * ny / (nx + ny)), x.size() + y.size()};
}

double mean(std::span<const double> x)
{
    if (x.empty()) {
        fail(ErrorCode::InvalidArgument, "mean of an empty sample");
    }
    double acc = 0.0;
    for (double v : x) {
        acc += v;
    }
    return acc / static_cast<double>(x.size());
}

double variance(std::span<const double> x)
{
    if (x.size() < 2) {
        fail(ErrorCode::InvalidArgument, "variance needs at least two values");
    }
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m) * (v - m);
    }
    return acc / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x)
{
    if (x.empty()) {
        fail(ErrorCode::InvalidArgument, "median of an empty sample");
    }
    const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
    std::nth_element(x.begin(), mid, x.end());
    if (x.size() % 2 == 1) {
        return *mid;
    }
    const double upper = *mid;
    const double lower = *std::max_element(x.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace urnlab
