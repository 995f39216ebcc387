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
#include <vector>

#include "urnlab/spectral.hpp"
#include "urnlab/urn.hpp"

// Exact small-n ground truth, computed by enumerating every draw sequence.
// Nothing here calls the simulator.
namespace urnlab::oracle {

inline constexpr unsigned kMaxDistributionSteps = 12;
inline constexpr unsigned kMaxTreeSteps = 10;

struct OutcomeAtom {
    Vector composition;
    double prob = 0.0;
};

// Law of C_n, atoms with equal compositions (to 1e-12) merged, sorted by
// composition.
std::vector<OutcomeAtom> exact_distribution(const ReplacementSpec& spec, unsigned n);

// E[C_n . v] for an eigenvector v of R with eigenvalue a; equals
// Pi_n(a) C_0 . v.
double exact_mean_linear(const ReplacementSpec& spec, const Vector& v, double a, unsigned n);

// Largest |E[M_{m+1}^2] - E[M_m^2] - E[(M_{m+1} - M_m)^2 | F_m]| over m < n
// and over the class's eigen-tracks M_m = C_m . v / Pi_m(a), a != 1.
double exact_conditional_variance_check(const ReplacementSpec& spec, const StructureClass& cls, unsigned n);

// Largest |E[X_{m+1} | F_m] - X_m| over every node of the depth-n draw tree for
//   X_m = C_m . generalized / Pi_m(a) - sum_{j=sum_start}^{m-1} C_j . base / ((j+1) Pi_{j+1}(a)).
// With R generalized = base + a generalized this is a martingale for
// sum_start = 0 at every depth.
double compensated_martingale_check(const ReplacementSpec& spec, const Vector& base, const Vector& generalized,
                                    double eigenvalue, unsigned n, unsigned sum_start = 0);

// Jordan families: (t1, t2, s) for three colors, (t2, t3, beta) for four.
double compensated_martingale_check(const ReplacementSpec& spec, const StructureClass& cls, unsigned n);

// One-dominant three-color urns: on every enumeration edge the S.xi track
// moves by s lambda xi_i when a non-dominant color i is drawn, else by 0.
double evolution_identity_check(const ReplacementSpec& spec, const StructureClass& cls, unsigned n);

// Total variation between an empirical list of compositions and the exact law.
double total_variation(const std::vector<OutcomeAtom>& exact, const std::vector<Vector>& samples);

} // namespace urnlab::oracle
