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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "urnlab/linalg.hpp"
#include "urnlab/urn.hpp"

// Hand-rolled generators for property tests. Every generator draws from a
// caller-owned engine so failures replay from the printed case index.
namespace urntest {

using urnlab::Matrix;
using urnlab::ReplacementSpec;
using urnlab::Vector;

using Engine = std::mt19937_64;

inline double uniform(Engine& g, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Multiples of 1/den in [lo, hi] (both multiples of 1/den).
inline double dyadic(Engine& g, int lo, int hi, int den)
{
    return static_cast<double>(std::uniform_int_distribution<int>(lo, hi)(g)) / den;
}

inline Vector probability(Engine& g, std::size_t k)
{
    Vector w(k);
    for (auto& x : w) {
        x = uniform(g, 0.05, 1.0);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) {
        x /= total;
    }
    return w;
}

// 2x2 irreducible stochastic block [[1-a, a], [b, 1-b]].
inline Matrix block(double a, double b)
{
    return {{1.0 - a, a}, {b, 1.0 - b}};
}

inline Matrix random_block(Engine& g)
{
    return block(uniform(g, 0.05, 0.95), uniform(g, 0.05, 0.95));
}

inline Matrix two_irreducible(Engine& g)
{
    return random_block(g);
}

inline Matrix two_triangular(double s)
{
    return {{s, 1.0 - s}, {0.0, 1.0}};
}

inline Matrix three_one_dominant(double s, const Matrix& q)
{
    return {{s * q(0, 0), s * q(0, 1), 1.0 - s}, {s * q(1, 0), s * q(1, 1), 1.0 - s}, {0.0, 0.0, 1.0}};
}

inline Matrix three_two_dominant(double s, const Matrix& p, const Vector& mix)
{
    return {{s, (1.0 - s) * mix[0], (1.0 - s) * mix[1]}, {0.0, p(0, 0), p(0, 1)}, {0.0, p(1, 0), p(1, 1)}};
}

// [[sQ, E], [0, P]] with E's rows summing to 1 - s.
inline Matrix four_block(double s, const Matrix& q, const Matrix& e, const Matrix& p)
{
    Matrix r(4, 4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            r(i, j) = s * q(i, j);
            r(i, j + 2) = e(i, j);
            r(i + 2, j + 2) = p(i, j);
        }
    }
    return r;
}

inline Matrix random_e(Engine& g, double s)
{
    const double f0 = uniform(g, 0.1, 0.9);
    const double f1 = uniform(g, 0.1, 0.9);
    return {{(1.0 - s) * f0, (1.0 - s) * (1.0 - f0)}, {(1.0 - s) * f1, (1.0 - s) * (1.0 - f1)}};
}

inline std::vector<std::size_t> random_permutation(Engine& g, std::size_t k)
{
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), g);
    return perm;
}

// Relabels colors: new color perm[c] plays the role of old color c.
inline Matrix relabel(const Matrix& r, const std::vector<std::size_t>& perm)
{
    Matrix out(r.rows(), r.cols());
    for (std::size_t i = 0; i < r.rows(); ++i) {
        for (std::size_t j = 0; j < r.cols(); ++j) {
            out(perm[i], perm[j]) = r(i, j);
        }
    }
    return out;
}

inline Vector relabel(const Vector& v, const std::vector<std::size_t>& perm)
{
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[perm[i]] = v[i];
    }
    return out;
}

inline ReplacementSpec make(const Matrix& r, const Vector& c0)
{
    return ReplacementSpec::make(r, c0);
}

inline Vector uniform_c0(std::size_t k)
{
    return Vector(k, 1.0 / static_cast<double>(k));
}

// Exact (up to rounding) residual max |R v - a v|.
inline double eigen_residual(const Matrix& r, const Vector& v, double a)
{
    const Vector rv = r * v;
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        worst = std::max(worst, std::abs(rv[i] - a * v[i]));
    }
    return worst;
}

} // namespace urntest
