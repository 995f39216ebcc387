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

#include "urnlab/urn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "urnlab/error.hpp"

namespace urnlab {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kRowSumTol = 1e-9;

std::string cell(std::size_t i, std::size_t j)
{
    return "R[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

template <std::size_t K>
void advance_fixed(const double* r, double* counts, std::uint64_t steps, UniformStream& rng)
{
    std::array<double, K> c;
    std::copy_n(counts, K, c.begin());
    for (std::uint64_t t = 0; t < steps; ++t) {
        double total = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            total += c[i];
        }
        const double target = rng.next() * total;
        std::size_t pick = 0;
        double acc = c[0];
        while (pick + 1 < K && !(target < acc)) {
            ++pick;
            acc += c[pick];
        }
        while (c[pick] <= 0.0 && pick > 0) {
            --pick;
        }
        const double* row = r + pick * K;
        for (std::size_t j = 0; j < K; ++j) {
            c[j] += row[j];
        }
    }
    std::copy_n(c.begin(), K, counts);
}

void advance_dynamic(const Matrix& r, Vector& counts, std::uint64_t steps, UniformStream& rng)
{
    const std::size_t k = counts.size();
    for (std::uint64_t t = 0; t < steps; ++t) {
        const std::size_t pick = draw(counts, rng.next());
        const auto row = r.row(pick);
        for (std::size_t j = 0; j < k; ++j) {
            counts[j] += row[j];
        }
    }
}

} // namespace

ReplacementSpec ReplacementSpec::make(Matrix replacement, Vector initial)
{
    const std::size_t k = replacement.rows();
    if (k < 2) {
        fail(ErrorCode::InvalidArgument, "replacement matrix needs at least 2 colors");
    }
    if (replacement.cols() != k) {
        fail(ErrorCode::InvalidArgument, "replacement matrix is " + std::to_string(k) + "x" +
                                             std::to_string(replacement.cols()) + ", expected square");
    }
    if (initial.size() != k) {
        fail(ErrorCode::InvalidArgument, "C0 has " + std::to_string(initial.size()) +
                                             " entries, expected " + std::to_string(k));
    }
    Vector sums(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double x = replacement(i, j);
            if (!std::isfinite(x)) {
                fail(ErrorCode::InvalidArgument, cell(i, j) + " is not finite");
            }
            if (x < 0.0) {
                fail(ErrorCode::InvalidArgument, cell(i, j) + " is negative");
            }
            sums[i] += x;
        }
    }
    const double common = sums[0];
    for (std::size_t i = 1; i < k; ++i) {
        if (std::abs(sums[i] - common) > kRowSumTol) {
            fail(ErrorCode::InvalidArgument, "row sums differ: row 0 sums to " + std::to_string(common) +
                                                 ", row " + std::to_string(i) + " sums to " +
                                                 std::to_string(sums[i]));
        }
    }
    if (!(common > 0.0)) {
        fail(ErrorCode::InvalidArgument, "replacement rows sum to zero");
    }
    double scale = 1.0;
    if (std::abs(common - 1.0) > kProbTol) {
        scale = common;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                replacement(i, j) /= scale;
            }
        }
    }
    double c0_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!std::isfinite(initial[i]) || initial[i] < 0.0) {
            fail(ErrorCode::InvalidArgument, "C0[" + std::to_string(i) + "] is negative or not finite");
        }
        c0_sum += initial[i];
    }
    if (std::abs(c0_sum - 1.0) > kProbTol) {
        fail(ErrorCode::InvalidArgument, "C0 sums to " + std::to_string(c0_sum) + ", expected 1");
    }
    return ReplacementSpec(std::move(replacement), std::move(initial), scale);
}

double UrnState::mass() const
{
    double total = 0.0;
    for (double x : counts) {
        total += x;
    }
    return total;
}

UrnState step(const ReplacementSpec& spec, const UrnState& state, std::size_t color)
{
    if (color >= spec.colors()) {
        fail(ErrorCode::InvalidArgument, "color " + std::to_string(color) + " out of range");
    }
    UrnState next = state;
    const auto row = spec.replacement().row(color);
    for (std::size_t j = 0; j < next.counts.size(); ++j) {
        next.counts[j] += row[j];
    }
    ++next.n;
    return next;
}

std::size_t draw(std::span<const double> counts, double u)
{
    double total = 0.0;
    for (double x : counts) {
        total += x;
    }
    if (!(total > 0.0)) {
        fail(ErrorCode::Domain, "cannot draw from an empty urn");
    }
    const double target = u * total;
    std::size_t pick = 0;
    double acc = counts[0];
    while (pick + 1 < counts.size() && !(target < acc)) {
        ++pick;
        acc += counts[pick];
    }
    // u * total can round up to total; fall back to the last non-empty color.
    while (counts[pick] <= 0.0 && pick > 0) {
        --pick;
    }
    return pick;
}

std::size_t draw(const UrnState& state, UniformStream& rng) { return draw(state.counts, rng.next()); }

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon, unsigned per_octave)
{
    if (per_octave == 0) {
        fail(ErrorCode::InvalidArgument, "per_octave must be positive");
    }
    std::set<std::uint64_t> grid;
    for (std::uint64_t p = 1; p <= horizon; p *= 2) {
        grid.insert(p);
        if (p > horizon / 2) {
            break;
        }
    }
    if (per_octave > 1) {
        const double ratio = std::pow(2.0, 1.0 / per_octave);
        for (double x = 1.0; x <= static_cast<double>(horizon); x *= ratio) {
            grid.insert(static_cast<std::uint64_t>(std::llround(x)));
        }
    }
    grid.insert(horizon);
    grid.erase(0);
    std::vector<std::uint64_t> out;
    for (auto n : grid) {
        if (n <= horizon) {
            out.push_back(n);
        }
    }
    return out;
}

void validate_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t horizon)
{
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] > horizon) {
            fail(ErrorCode::InvalidArgument, "checkpoint " + std::to_string(checkpoints[i]) +
                                                 " beyond horizon " + std::to_string(horizon));
        }
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            fail(ErrorCode::InvalidArgument, "checkpoints must be strictly increasing");
        }
    }
}

void advance(const ReplacementSpec& spec, Vector& counts, std::uint64_t steps, UniformStream& rng)
{
    const double* r = spec.replacement().data().data();
    switch (spec.colors()) {
    case 2:
        advance_fixed<2>(r, counts.data(), steps, rng);
        break;
    case 3:
        advance_fixed<3>(r, counts.data(), steps, rng);
        break;
    case 4:
        advance_fixed<4>(r, counts.data(), steps, rng);
        break;
    default:
        advance_dynamic(spec.replacement(), counts, steps, rng);
    }
}

Trajectory simulate(const ReplacementSpec& spec, std::uint64_t horizon, std::uint64_t seed,
                    std::uint64_t stream, std::span<const std::uint64_t> checkpoints,
                    std::span<const Vector> track_vectors)
{
    if (horizon < 1) {
        fail(ErrorCode::InvalidArgument, "horizon must be at least 1");
    }
    validate_checkpoints(checkpoints, horizon);
    for (const auto& v : track_vectors) {
        if (v.size() != spec.colors()) {
            fail(ErrorCode::InvalidArgument, "track vector has wrong length");
        }
    }
    Trajectory out;
    out.seed = seed;
    out.stream = stream;
    out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    out.tracks.assign(track_vectors.size(), Vector{});
    UniformStream rng(seed, stream);
    Vector counts = spec.initial();
    std::uint64_t n = 0;
    for (const auto cp : checkpoints) {
        advance(spec, counts, cp - n, rng);
        n = cp;
        out.states.push_back(counts);
        for (std::size_t v = 0; v < track_vectors.size(); ++v) {
            out.tracks[v].push_back(dot(counts, track_vectors[v]));
        }
    }
    if (n < horizon) {
        advance(spec, counts, horizon - n, rng);
    }
    return out;
}

} // namespace urnlab
