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

#include "urnlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "urnlab/error.hpp"

namespace urnlab {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size())
{
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            fail(ErrorCode::InvalidArgument, "ragged matrix literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows)
{
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            fail(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " has " +
                                                 std::to_string(rows[i].size()) + " entries, expected " +
                                                 std::to_string(cols));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * cols));
    }
    return m;
}

Vector Matrix::column(std::size_t j) const
{
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = (*this)(i, j);
    }
    return out;
}

Vector Matrix::operator*(std::span<const double> v) const
{
    if (v.size() != cols_) {
        fail(ErrorCode::InvalidArgument, "matrix-vector dimension mismatch");
    }
    Vector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = dot(row(i), v);
    }
    return out;
}

Matrix Matrix::operator*(const Matrix& other) const
{
    if (cols_ != other.rows_) {
        fail(ErrorCode::InvalidArgument, "matrix-matrix dimension mismatch");
    }
    Matrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            for (std::size_t j = 0; j < other.cols_; ++j) {
                out(i, j) += a * other(k, j);
            }
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        fail(ErrorCode::InvalidArgument, "dot product dimension mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorCode::InvalidArgument, "matrix shape mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

Vector squared(std::span<const double> v)
{
    Vector out(v.begin(), v.end());
    for (double& x : out) {
        x *= x;
    }
    return out;
}

Vector ones(std::size_t n) { return Vector(n, 1.0); }

Vector unit(std::size_t n, std::size_t i)
{
    Vector out(n, 0.0);
    out.at(i) = 1.0;
    return out;
}

double determinant(Matrix m)
{
    const std::size_t n = m.rows();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(m(r, c)) > std::abs(m(pivot, c))) {
                pivot = r;
            }
        }
        if (m(pivot, c) == 0.0) {
            return 0.0;
        }
        if (pivot != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(pivot, j), m(c, j));
            }
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) {
                m(r, j) -= f * m(c, j);
            }
        }
    }
    return det;
}

} // namespace urnlab
