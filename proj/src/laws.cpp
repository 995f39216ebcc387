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

#include "urnlab/laws.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "urnlab/error.hpp"

namespace urnlab {

namespace {

constexpr double kTie = 1e-9;
constexpr std::uint64_t kDirectProductLimit = 1000;

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

LawPrediction mass_law(const Vector& v)
{
    LawPrediction p;
    p.label = "C_n.1";
    p.regime = "total mass is n + 1";
    p.vector = v;
    p.normalization = {NormKind::DivideByNPlus1, 0.0};
    p.kind = LimitKind::DeterministicConstant;
    p.value = 1.0;
    return p;
}

LawPrediction constant_track(std::string label, const Vector& v, const ReplacementSpec& spec, std::string regime)
{
    LawPrediction p;
    p.label = std::move(label);
    p.regime = std::move(regime);
    p.vector = v;
    p.normalization = {NormKind::Power, 0.0};
    p.kind = LimitKind::ExactlyConstantTrack;
    p.value = dot(spec.initial(), v);
    return p;
}

LawPrediction positive_limit(std::string label, const Vector& v, double exponent, std::string regime)
{
    LawPrediction p;
    p.label = std::move(label);
    p.regime = std::move(regime);
    p.vector = v;
    p.normalization = {NormKind::Power, exponent};
    p.kind = LimitKind::ASRandomVariable;
    p.positive = true;
    return p;
}

// Eigenvector track with eigenvalue `lambda` fed by a single irreducible block
// whose stationary law gives weight `pi_xi2` = pi . xi^2.
LawPrediction eigen_law(std::string label, const Vector& v, double lambda, double pi_xi2,
                        const ReplacementSpec& spec)
{
    if (std::abs(lambda) <= kTie) {
        return constant_track(std::move(label), v, spec, "eigenvalue 0: R v = 0 so the track never moves");
    }
    LawPrediction p;
    p.label = std::move(label);
    p.vector = v;
    if (lambda < 0.5 - kTie) {
        p.regime = "eigenvalue " + fmt(lambda) + " < 1/2: normal at sqrt(n)";
        p.kind = LimitKind::Normal;
        p.normalization = {NormKind::SqrtN, 0.5};
        p.value = lambda * lambda / (1.0 - 2.0 * lambda) * pi_xi2;
    } else if (std::abs(lambda - 0.5) <= kTie) {
        p.regime = "eigenvalue 1/2: normal at sqrt(n log n)";
        p.kind = LimitKind::Normal;
        p.normalization = {NormKind::SqrtNLogN, 0.5};
        p.value = lambda * lambda * pi_xi2;
    } else {
        p.regime = "eigenvalue " + fmt(lambda) + " > 1/2: almost sure limit at n^lambda";
        p.kind = LimitKind::ASRandomVariable;
        p.normalization = {NormKind::Power, lambda};
    }
    return p;
}

// Track S_n . xi of the non-dominant block sQ: fluctuations scale with the
// random non-dominant mass U = lim S_n.1 / n^s.
LawPrediction mixture_law(std::string label, const Vector& v, double s, double lambda, double piq_xi2,
                          const PathVariable& u, const ReplacementSpec& spec)
{
    if (std::abs(lambda) <= kTie) {
        return constant_track(std::move(label), v, spec,
                              "Q has equal rows: the track changes by s Q xi = 0 at every non-dominant draw");
    }
    LawPrediction p;
    p.label = std::move(label);
    p.vector = v;
    if (lambda < 0.5 - kTie) {
        p.regime = "lambda " + fmt(lambda) + " < 1/2: variance mixture of normals at n^(s/2)";
        p.kind = LimitKind::NormalMixture;
        p.normalization = {NormKind::HalfPower, s};
        p.value = s * s * lambda * lambda / (s * (1.0 - 2.0 * lambda)) * piq_xi2;
        p.mixing = u;
    } else if (std::abs(lambda - 0.5) <= kTie) {
        p.regime = "lambda = 1/2: variance mixture of normals at sqrt(n^s log n)";
        p.kind = LimitKind::NormalMixture;
        p.normalization = {NormKind::SqrtPowerLog, s};
        p.value = s * s * lambda * lambda * piq_xi2;
        p.mixing = u;
    } else {
        p.regime = "lambda " + fmt(lambda) + " > 1/2: almost sure limit at n^(s lambda)";
        p.kind = LimitKind::ASRandomVariable;
        p.normalization = {NormKind::Power, s * lambda};
    }
    return p;
}

double weighted_square(const Vector& pi, const Vector& xi) { return dot(pi, squared(xi)); }

Vector canonical_block(const StructureClass& cls, const Vector& full, std::size_t offset)
{
    return {full[cls.permutation[offset]], full[cls.permutation[offset + 1]]};
}

} // namespace

double pi_n(double lambda, std::uint64_t n)
{
    if (n == 0) {
        return 1.0;
    }
    if (!(1.0 + lambda > 0.0)) {
        fail(ErrorCode::Domain, "Pi_n(" + fmt(lambda) + ") has a non-positive factor");
    }
    if (n <= kDirectProductLimit) {
        double prod = 1.0;
        for (std::uint64_t j = 0; j < n; ++j) {
            prod *= 1.0 + lambda / static_cast<double>(j + 1);
        }
        return prod;
    }
    double log_sum = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) {
        log_sum += std::log1p(lambda / static_cast<double>(j + 1));
    }
    return std::exp(log_sum);
}

double euler_ratio(double lambda, std::uint64_t n)
{
    if (n == 0) {
        fail(ErrorCode::Domain, "euler_ratio needs n >= 1");
    }
    if (lambda < 0.0 && lambda == std::floor(lambda)) {
        fail(ErrorCode::Domain, "euler_ratio is undefined for negative integer lambda");
    }
    return pi_n(lambda, n) * std::tgamma(lambda + 1.0) / std::pow(static_cast<double>(n), lambda);
}

double Normalization::evaluate(std::uint64_t n) const
{
    const double x = static_cast<double>(n);
    double value = 0.0;
    switch (kind) {
    case NormKind::DivideByNPlus1: value = x + 1.0; break;
    case NormKind::Power: value = std::pow(x, exponent); break;
    case NormKind::SqrtN: value = std::sqrt(x); break;
    case NormKind::SqrtNLogN: value = std::sqrt(x * std::log(x)); break;
    case NormKind::HalfPower: value = std::pow(x, exponent / 2.0); break;
    case NormKind::SqrtPowerLog: value = std::sqrt(std::pow(x, exponent) * std::log(x)); break;
    case NormKind::PowerLog: value = std::pow(x, exponent) * std::log(x); break;
    case NormKind::PiN: value = pi_n(exponent, n); break;
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return value;
}

std::string Normalization::symbol() const
{
    switch (kind) {
    case NormKind::DivideByNPlus1: return "n+1";
    case NormKind::Power: return "n^" + fmt(exponent);
    case NormKind::SqrtN: return "sqrt(n)";
    case NormKind::SqrtNLogN: return "sqrt(n log n)";
    case NormKind::HalfPower: return "n^(" + fmt(exponent) + "/2)";
    case NormKind::SqrtPowerLog: return "sqrt(n^" + fmt(exponent) + " log n)";
    case NormKind::PowerLog: return "n^" + fmt(exponent) + " log n";
    case NormKind::PiN: return "Pi_n(" + fmt(exponent) + ")";
    }
    return "?";
}

std::string_view to_string(LimitKind k)
{
    switch (k) {
    case LimitKind::DeterministicConstant: return "DeterministicConstant";
    case LimitKind::ASConstantVector: return "ASConstantVector";
    case LimitKind::ASRandomVariable: return "ASRandomVariable";
    case LimitKind::Normal: return "Normal";
    case LimitKind::NormalMixture: return "NormalMixture";
    case LimitKind::ExactlyConstantTrack: return "ExactlyConstantTrack";
    }
    return "?";
}

std::vector<LawPrediction> predict(const ReplacementSpec& spec, const StructureClass& cls)
{
    const auto& combos = cls.combination_vectors;
    std::vector<LawPrediction> out;
    switch (cls.family) {
    case Family::Unsupported:
        fail(ErrorCode::Unsupported, "no predictions for an unsupported matrix: " + cls.reason);

    case Family::Identity: {
        out.push_back(mass_law(combos[0]));
        for (std::size_t i = 1; i < combos.size(); ++i) {
            const double a = spec.initial()[i - 1];
            LawPrediction p;
            p.label = cls.combination_names[i];
            p.regime = "identity replacement: Dirichlet(C0) marginal Beta(" + fmt(a) + ", " + fmt(1.0 - a) + ")";
            p.vector = combos[i];
            p.normalization = {NormKind::DivideByNPlus1, 0.0};
            p.kind = LimitKind::ASRandomVariable;
            p.positive = a > 0.0;
            p.limit_mean = a;
            p.limit_variance = a * (1.0 - a) / 2.0;
            out.push_back(std::move(p));
        }
        break;
    }

    case Family::TwoIrreducible: {
        out.push_back(mass_law(combos[0]));
        out.push_back(eigen_law("C_n.xi", combos[1], *cls.lambda, weighted_square(cls.pi_R, combos[1]), spec));
        break;
    }

    case Family::TwoTriangular: {
        out.push_back(mass_law(combos[0]));
        out.push_back(positive_limit("W_n", combos[1], *cls.s, "W_n / n^s converges a.s. to a positive limit"));
        break;
    }

    case Family::ThreeOneDominant: {
        const double s = *cls.s;
        const PathVariable u{combos[1], s, "U"};
        out.push_back(mass_law(combos[0]));
        out.push_back(positive_limit("S_n.1", combos[1], s, "non-dominant mass / n^s converges a.s. to U > 0"));
        out.push_back(mixture_law("S_n.xi", combos[2], s, *cls.lambda, weighted_square(cls.pi_Q, cls.xi), u, spec));
        break;
    }

    case Family::ThreeTwoDominantDiag: {
        out.push_back(mass_law(combos[0]));
        out.push_back(positive_limit("W_n", combos[1], *cls.s, "W_n / n^s converges a.s. to V > 0"));
        auto law = eigen_law("C_n.v2", combos[2], *cls.lambda, weighted_square(cls.pi_P, cls.xi), spec);
        law.unverified = cls.periodic_P && law.kind != LimitKind::ExactlyConstantTrack;
        out.push_back(std::move(law));
        break;
    }

    case Family::ThreeTwoDominantJordan: {
        const double s = *cls.s;
        out.push_back(mass_law(combos[0]));
        out.push_back(positive_limit("W_n", combos[1], s, "W_n / n^s converges a.s. to V > 0"));
        const Vector lower = canonical_block(cls, combos[2], 1);
        LawPrediction p;
        p.label = "C_n.t2";
        p.vector = combos[2];
        if (s < 0.5 - kTie) {
            p.regime = "s " + fmt(s) + " < 1/2: normal at sqrt(n)";
            p.kind = LimitKind::Normal;
            p.normalization = {NormKind::SqrtN, 0.5};
            p.value = s * s / (1.0 - 2.0 * s) * weighted_square(cls.pi_P, lower);
        } else {
            p.regime = "s " + fmt(s) + " >= 1/2: converges a.s. to V at n^s log n";
            p.kind = LimitKind::ASRandomVariable;
            p.normalization = {NormKind::PowerLog, s};
            p.companion = PathVariable{combos[1], s, "V"};
        }
        out.push_back(std::move(p));
        break;
    }

    case Family::FourBlockDiag:
    case Family::FourBlockJordan: {
        const double s = *cls.s;
        const double beta = *cls.beta;
        const PathVariable u{combos[1], s, "U"};
        out.push_back(mass_law(combos[0]));
        out.push_back(positive_limit("C_n.v1", combos[1], s, "non-dominant mass / n^s converges a.s. to U > 0"));
        out.push_back(mixture_law("C_n.v2", combos[2], s, *cls.lambda, weighted_square(cls.pi_Q, cls.xi), u, spec));
        if (cls.family == Family::FourBlockDiag) {
            out.push_back(eigen_law("C_n.v3", combos[3], beta, weighted_square(cls.pi_P, cls.nu), spec));
            break;
        }
        LawPrediction p;
        p.label = "C_n.t3";
        p.vector = combos[3];
        if (std::abs(beta) <= kTie) {
            p.regime = "repeated eigenvalue 0: variance mixture of normals at n^(s/2)";
            p.kind = LimitKind::NormalMixture;
            p.normalization = {NormKind::HalfPower, s};
            p.value = weighted_square(cls.pi_Q, cls.xi) / s;
            p.mixing = u;
        } else if (beta < 0.5 - kTie) {
            p.regime = "beta " + fmt(beta) + " < 1/2: normal at sqrt(n)";
            p.kind = LimitKind::Normal;
            p.normalization = {NormKind::SqrtN, 0.5};
            p.value = beta * beta / (1.0 - 2.0 * beta) * weighted_square(cls.pi_P, cls.nu);
        } else {
            const bool tie_s = std::abs(beta - s) <= kTie;
            p.regime = std::string("beta ") + fmt(beta) + " >= 1/2: converges a.s. to " + (tie_s ? "U" : "V") +
                       " at n^beta log n";
            p.kind = LimitKind::ASRandomVariable;
            p.normalization = {NormKind::PowerLog, beta};
            p.companion = PathVariable{cls.jordan->T.column(1), beta, tie_s ? "U" : "V"};
        }
        out.push_back(std::move(p));
        break;
    }
    }
    return out;
}

} // namespace urnlab
