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

#include "urnlab/oracle.hpp"

#include <cmath>
#include <map>
#include <string>

#include "urnlab/error.hpp"
#include "urnlab/laws.hpp"

namespace urnlab::oracle {

namespace {

using Key = std::vector<long long>;

Key key_of(const Vector& c)
{
    Key k(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        k[i] = std::llround(c[i] * 1e12);
    }
    return k;
}

void guard(const ReplacementSpec& spec, unsigned n, unsigned limit)
{
    if (spec.colors() > 4) {
        fail(ErrorCode::Resource, "exact enumeration supports at most 4 colors");
    }
    if (n > limit) {
        fail(ErrorCode::Resource, "exact enumeration limited to n <= " + std::to_string(limit));
    }
}

using Layer = std::map<Key, OutcomeAtom>;

Layer next_layer(const ReplacementSpec& spec, const Layer& layer)
{
    const auto& r = spec.replacement();
    const std::size_t k = spec.colors();
    Layer out;
    for (const auto& [key, atom] : layer) {
        double total = 0.0;
        for (double x : atom.composition) {
            total += x;
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (atom.composition[i] <= 0.0) {
                continue;
            }
            Vector child = atom.composition;
            for (std::size_t j = 0; j < k; ++j) {
                child[j] += r(i, j);
            }
            auto& slot = out[key_of(child)];
            if (slot.composition.empty()) {
                slot.composition = std::move(child);
            }
            slot.prob += atom.prob * atom.composition[i] / total;
        }
    }
    return out;
}

std::vector<Layer> layers(const ReplacementSpec& spec, unsigned n)
{
    std::vector<Layer> out;
    Layer first;
    first[key_of(spec.initial())] = {spec.initial(), 1.0};
    out.push_back(std::move(first));
    for (unsigned m = 0; m < n; ++m) {
        out.push_back(next_layer(spec, out.back()));
    }
    return out;
}

struct TreeWalk {
    const ReplacementSpec& spec;
    const Vector& base;
    const Vector& generalized;
    double eigenvalue;
    unsigned depth;
    unsigned sum_start;
    std::vector<double> pis;
    double worst = 0.0;

    double value(const Vector& c, unsigned m, double comp) const
    {
        return dot(c, generalized) / pis[m] - comp;
    }

    // `comp` is the compensator sum through index m - 1.
    void visit(const Vector& c, unsigned m, double comp)
    {
        if (m == depth) {
            return;
        }
        const std::size_t k = c.size();
        double total = 0.0;
        for (double x : c) {
            total += x;
        }
        const double next_comp =
            m >= sum_start ? comp + dot(c, base) / (static_cast<double>(m + 1) * pis[m + 1]) : comp;
        double expected = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (c[i] <= 0.0) {
                continue;
            }
            Vector child = c;
            for (std::size_t j = 0; j < k; ++j) {
                child[j] += spec.replacement()(i, j);
            }
            expected += c[i] / total * value(child, m + 1, next_comp);
            visit(child, m + 1, next_comp);
        }
        worst = std::max(worst, std::abs(expected - value(c, m, comp)));
    }
};

} // namespace

std::vector<OutcomeAtom> exact_distribution(const ReplacementSpec& spec, unsigned n)
{
    guard(spec, n, kMaxDistributionSteps);
    auto all = layers(spec, n);
    std::vector<OutcomeAtom> out;
    for (auto& [key, atom] : all.back()) {
        out.push_back(std::move(atom));
    }
    return out;
}

double exact_mean_linear(const ReplacementSpec& spec, const Vector& v, double a, unsigned n)
{
    const Vector rv = spec.replacement() * v;
    for (std::size_t i = 0; i < rv.size(); ++i) {
        if (std::abs(rv[i] - a * v[i]) >= 1e-10) {
            fail(ErrorCode::InvalidArgument, "vector is not an eigenvector for the given eigenvalue");
        }
    }
    double mean = 0.0;
    for (const auto& atom : exact_distribution(spec, n)) {
        mean += atom.prob * dot(atom.composition, v);
    }
    return mean;
}

double exact_conditional_variance_check(const ReplacementSpec& spec, const StructureClass& cls, unsigned n)
{
    guard(spec, n, kMaxTreeSteps);
    if (is_jordan(cls.family)) {
        fail(ErrorCode::InvalidArgument, "Jordan families have no pure eigen-martingale for the generalized "
                                         "vector; use compensated_martingale_check");
    }
    std::vector<const EigenPair*> tracks;
    for (const auto& pair : cls.eigenpairs) {
        if (std::abs(pair.value - 1.0) > 1e-12) {
            tracks.push_back(&pair);
        }
    }
    if (tracks.empty()) {
        fail(ErrorCode::InvalidArgument, "class has no eigen-track with eigenvalue other than 1");
    }
    const auto all = layers(spec, n);
    double worst = 0.0;
    for (const auto* pair : tracks) {
        const double a = pair->value;
        const Vector& v = pair->vector;
        const Vector v2 = squared(v);
        for (unsigned m = 0; m < n; ++m) {
            const double pi_m = pi_n(a, m);
            const double pi_next = pi_n(a, m + 1);
            double second_now = 0.0;
            double increment = 0.0;
            for (const auto& [key, atom] : all[m]) {
                const double x = dot(atom.composition, v);
                const double mass = static_cast<double>(m + 1);
                second_now += atom.prob * (x / pi_m) * (x / pi_m);
                const double f = a / pi_next;
                increment += atom.prob * f * f * (dot(atom.composition, v2) / mass - (x / mass) * (x / mass));
            }
            double second_next = 0.0;
            for (const auto& [key, atom] : all[m + 1]) {
                const double x = dot(atom.composition, v) / pi_next;
                second_next += atom.prob * x * x;
            }
            worst = std::max(worst, std::abs(second_next - second_now - increment));
        }
    }
    return worst;
}

double compensated_martingale_check(const ReplacementSpec& spec, const Vector& base, const Vector& generalized,
                                    double eigenvalue, unsigned n, unsigned sum_start)
{
    guard(spec, n, kMaxTreeSteps);
    if (base.size() != spec.colors() || generalized.size() != spec.colors()) {
        fail(ErrorCode::InvalidArgument, "basis vectors have the wrong length");
    }
    TreeWalk walk{spec, base, generalized, eigenvalue, n, sum_start, {}, 0.0};
    for (unsigned m = 0; m <= n + 1; ++m) {
        walk.pis.push_back(pi_n(eigenvalue, m));
    }
    walk.visit(spec.initial(), 0, 0.0);
    return walk.worst;
}

double compensated_martingale_check(const ReplacementSpec& spec, const StructureClass& cls, unsigned n)
{
    if (!is_jordan(cls.family) || !cls.jordan) {
        fail(ErrorCode::InvalidArgument, "compensated martingale check needs a Jordan family");
    }
    const Matrix& t = cls.jordan->T;
    if (cls.family == Family::ThreeTwoDominantJordan) {
        return compensated_martingale_check(spec, t.column(0), t.column(1), *cls.s, n);
    }
    return compensated_martingale_check(spec, t.column(1), t.column(2), *cls.beta, n);
}

double evolution_identity_check(const ReplacementSpec& spec, const StructureClass& cls, unsigned n)
{
    guard(spec, n, kMaxDistributionSteps);
    if (cls.family != Family::ThreeOneDominant) {
        fail(ErrorCode::InvalidArgument, "evolution identity applies to the one-dominant three-color family");
    }
    const Vector& sxi = cls.combination_vectors[2];
    const double s = *cls.s;
    const double lambda = *cls.lambda;
    const std::size_t dominant = cls.permutation[2];
    const auto all = layers(spec, n);
    double worst = 0.0;
    for (unsigned m = 0; m < n; ++m) {
        for (const auto& [key, atom] : all[m]) {
            for (std::size_t i = 0; i < spec.colors(); ++i) {
                if (atom.composition[i] <= 0.0) {
                    continue;
                }
                Vector child = atom.composition;
                for (std::size_t j = 0; j < child.size(); ++j) {
                    child[j] += spec.replacement()(i, j);
                }
                const double moved = dot(child, sxi) - dot(atom.composition, sxi);
                const double expected = i == dominant ? 0.0 : lambda * s * sxi[i];
                worst = std::max(worst, std::abs(moved - expected));
            }
        }
    }
    return worst;
}

double total_variation(const std::vector<OutcomeAtom>& exact, const std::vector<Vector>& samples)
{
    if (samples.empty()) {
        fail(ErrorCode::InvalidArgument, "no samples");
    }
    std::map<Key, std::pair<double, double>> table;
    for (const auto& atom : exact) {
        table[key_of(atom.composition)].first += atom.prob;
    }
    const double w = 1.0 / static_cast<double>(samples.size());
    for (const auto& c : samples) {
        table[key_of(c)].second += w;
    }
    double tv = 0.0;
    for (const auto& [key, pq] : table) {
        tv += std::abs(pq.first - pq.second);
    }
    return 0.5 * tv;
}

} // namespace urnlab::oracle
