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
#include <cstdint>
#include <span>
#include <vector>

#include "urnlab/linalg.hpp"
#include "urnlab/rng.hpp"

namespace urnlab {

// Validated urn model: a K x K replacement matrix with unit row sums and a
// probability vector of initial ball mass.
class ReplacementSpec {
public:
    // Rows that share a common sum c != 1 are divided by c. Throws
    // Error(InvalidArgument) naming the offending cell or row.
    static ReplacementSpec make(Matrix replacement, Vector initial);

    std::size_t colors() const noexcept { return replacement_.rows(); }
    const Matrix& replacement() const noexcept { return replacement_; }
    const Vector& initial() const noexcept { return initial_; }
    // The common row sum divided out by make(); 1 when no rescaling happened.
    double row_scale() const noexcept { return row_scale_; }

private:
    ReplacementSpec(Matrix r, Vector c0, double scale)
        : replacement_(std::move(r)), initial_(std::move(c0)), row_scale_(scale) {}

    Matrix replacement_;
    Vector initial_;
    double row_scale_ = 1.0;
};

struct UrnState {
    Vector counts;
    std::uint64_t n = 0;

    static UrnState initial(const ReplacementSpec& spec) { return {spec.initial(), 0}; }
    double mass() const;
};

// Adds row `color` of R to the composition.
UrnState step(const ReplacementSpec& spec, const UrnState& state, std::size_t color);

// Cumulative-sum inversion in color order: returns the smallest i with
// u * sum(counts) < counts[0] + ... + counts[i], skipping empty colors.
std::size_t draw(std::span<const double> counts, double u);
std::size_t draw(const UrnState& state, UniformStream& rng);

struct Trajectory {
    std::vector<std::uint64_t> checkpoints;
    std::vector<Vector> states;
    // tracks[v][i] == dot(states[i], track_vectors[v])
    std::vector<Vector> tracks;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Powers of two up to horizon plus horizon itself. With per_octave > 1 the
// grid is refined geometrically (rounded, deduplicated).
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon, unsigned per_octave = 1);

void validate_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t horizon);

Trajectory simulate(const ReplacementSpec& spec, std::uint64_t horizon, std::uint64_t seed,
                    std::uint64_t stream, std::span<const std::uint64_t> checkpoints,
                    std::span<const Vector> track_vectors);

// Hot path used by ensembles: advances `counts` by `steps` draws in place.
void advance(const ReplacementSpec& spec, Vector& counts, std::uint64_t steps, UniformStream& rng);

} // namespace urnlab
