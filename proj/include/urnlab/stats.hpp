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

#include <cstddef>
#include <span>
#include <vector>

namespace urnlab {

double normal_cdf(double x);

// Asymptotic Kolmogorov tail Q(t) = 2 sum_k (-1)^(k-1) exp(-2 k^2 t^2).
double kolmogorov_tail(double t);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t size = 0;
};

// One-sample KS against N(0, 1). Needs at least 50 points; NaNs are ignored.
KsResult ks_standard_normal(std::span<const double> sample);

// Two-sample KS with the asymptotic p-value at effective size nm / (n + m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> x);
// Unbiased sample variance.
double variance(std::span<const double> x);
double median(std::vector<double> x);

} // namespace urnlab
