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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/spectral.hpp"

namespace urnlab {

// Pi_n(lambda) = prod_{j<n} (1 + lambda / (j + 1)). Direct product up to
// n = 1000, exp of summed log1p beyond. Throws Error(Domain) if a factor is
// not positive.
double pi_n(double lambda, std::uint64_t n);

// Pi_n(lambda) * Gamma(lambda + 1) / n^lambda, which tends to 1.
double euler_ratio(double lambda, std::uint64_t n);

enum class NormKind {
    DivideByNPlus1, // n + 1
    Power,          // n^a
    SqrtN,          // sqrt(n)
    SqrtNLogN,      // sqrt(n log n)
    HalfPower,      // n^(a/2)
    SqrtPowerLog,   // sqrt(n^a log n)
    PowerLog,       // n^a log n
    PiN,            // Pi_n(a)
};

struct Normalization {
    NormKind kind = NormKind::Power;
    double exponent = 0.0;

    // NaN where the sequence vanishes (log n at n = 1) or n = 0 for log forms.
    double evaluate(std::uint64_t n) const;
    std::string symbol() const;
};

enum class LimitKind {
    DeterministicConstant,
    ASConstantVector,
    ASRandomVariable,
    Normal,
    NormalMixture,
    ExactlyConstantTrack,
};

std::string_view to_string(LimitKind k);

// Per-trajectory companion variable C_n . vector / n^exponent, used both for
// the mixing variable U and for the a.s. partner of log-rate limits.
struct PathVariable {
    Vector vector;
    double exponent = 0.0;
    std::string name;
};

struct LawPrediction {
    std::string label;
    std::string regime;
    Vector vector;
    Normalization normalization;
    LimitKind kind = LimitKind::ASRandomVariable;
    // Normal: variance. NormalMixture: coefficient c in N(0, c U).
    // DeterministicConstant / ExactlyConstantTrack: the constant.
    double value = 0.0;
    bool positive = false;
    std::optional<PathVariable> mixing;
    std::optional<PathVariable> companion;
    // Known limit moments (Dirichlet marginals of the identity urn).
    std::optional<double> limit_mean;
    std::optional<double> limit_variance;
    // Periodic dominant block: the formula is reported but not checked.
    bool unverified = false;
};

// One prediction per combination vector of the class, in the same order.
// Throws Error(Unsupported) for Family::Unsupported.
std::vector<LawPrediction> predict(const ReplacementSpec& spec, const StructureClass& cls);

} // namespace urnlab
