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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/linalg.hpp"
#include "urnlab/urn.hpp"

namespace urnlab {

enum class Family {
    Identity,
    TwoIrreducible,
    TwoTriangular,
    ThreeOneDominant,
    ThreeTwoDominantDiag,
    ThreeTwoDominantJordan,
    FourBlockDiag,
    FourBlockJordan,
    Unsupported,
};

std::string_view to_string(Family f);
bool is_jordan(Family f);

struct EigenPair {
    double value = 0.0;
    Vector vector;
    std::string name;
};

struct JordanBasis {
    Matrix T;
    Matrix J;
};

// Family membership plus spectral data. Full-length vectors (eigenpairs,
// combination vectors, columns of T) are in the caller's color labels;
// the 2-vectors of a diagonal block (xi, nu, p, pi_P, pi_Q) are in the block's
// canonical labels, i.e. after applying `permutation`.
struct StructureClass {
    Family family = Family::Unsupported;
    std::size_t colors = 0;
    // canonical index c corresponds to original color permutation[c]
    std::vector<std::size_t> permutation;
    std::string reason;

    std::optional<double> s;
    std::optional<double> lambda;
    std::optional<double> beta;

    Vector pi_R;
    Vector pi_P;
    Vector pi_Q;
    Vector xi;
    Vector nu;
    Vector p;
    bool periodic_P = false;

    std::optional<JordanBasis> jordan;
    std::vector<EigenPair> eigenpairs;
    std::vector<Vector> combination_vectors;
    std::vector<std::string> combination_names;

    // Canonical 2-vector -> full-length vector placed on canonical colors
    // [offset, offset + 2), returned in original labels.
    Vector embed(const Vector& block, std::size_t offset) const;
    Vector to_original(const Vector& canonical) const;
};

struct Eigen2 {
    double lambda = 0.0;
    Vector xi;
    bool periodic = false;
};

struct Stationary2 {
    Vector pi;
    bool aperiodic = true;
};

// Scale so max|v_i| = 1 with the first nonzero coordinate positive.
Vector normalize_eigvec(const Vector& v);

// Non-principal pair of a 2x2 stochastic matrix: lambda = trace - 1.
// Throws Error(Domain) for the identity.
Eigen2 eigenpair_2x2(const Matrix& m);

// pi = (b, a) / (a + b) for M = [[1-a, a], [b, 1-b]].
Stationary2 stationary_2x2(const Matrix& m);

StructureClass classify(const ReplacementSpec& spec);

// Generalized eigenbasis for the Jordan families, in original labels.
JordanBasis jordan_basis(const ReplacementSpec& spec, const StructureClass& cls);

// Max residual of the stored eigenpairs / Jordan identity.
double spectral_residual(const ReplacementSpec& spec, const StructureClass& cls);

} // namespace urnlab
