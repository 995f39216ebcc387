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

#include "urnlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "urnlab/error.hpp"

namespace urnlab {

namespace {

constexpr double kZero = 1e-12;
// |a - b| below this counts as a repeated eigenvalue.
constexpr double kTie = 1e-9;
constexpr double kResidualTol = 1e-10;

bool is_zero(double x) { return std::abs(x) <= kZero; }
bool in_open_unit(double s) { return s > kZero && s < 1.0 - kZero; }

Matrix permuted(const Matrix& r, const std::vector<std::size_t>& perm)
{
    Matrix out(r.rows(), r.cols());
    for (std::size_t a = 0; a < r.rows(); ++a) {
        for (std::size_t b = 0; b < r.cols(); ++b) {
            out(a, b) = r(perm[a], perm[b]);
        }
    }
    return out;
}

Matrix block2(const Matrix& m, std::size_t r0, std::size_t c0, double scale = 1.0)
{
    return Matrix{{m(r0, c0) / scale, m(r0, c0 + 1) / scale},
                  {m(r0 + 1, c0) / scale, m(r0 + 1, c0 + 1) / scale}};
}

bool irreducible2(const Matrix& m) { return m(0, 1) > kZero && m(1, 0) > kZero; }

Vector solve2(const Matrix& a, const Vector& b)
{
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(det) <= kZero) {
        fail(ErrorCode::Internal, "singular 2x2 system");
    }
    return {(b[0] * a(1, 1) - a(0, 1) * b[1]) / det, (a(0, 0) * b[1] - a(1, 0) * b[0]) / det};
}

// One solution of a consistent rank-1 2x2 system: the unknown paired with the
// largest coefficient is solved for, the other set to zero.
Vector solve_rank1(const Matrix& a, const Vector& b)
{
    std::size_t row = 0;
    std::size_t col = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            if (std::abs(a(i, j)) > best) {
                best = std::abs(a(i, j));
                row = i;
                col = j;
            }
        }
    }
    Vector x(2, 0.0);
    if (best <= kZero) {
        return x;
    }
    x[col] = b[row] / a(row, col);
    return x;
}

struct Match {
    std::optional<StructureClass> cls;
    std::string reason;
};

StructureClass start(Family f, std::size_t k, const std::vector<std::size_t>& perm)
{
    StructureClass c;
    c.family = f;
    c.colors = k;
    c.permutation = perm;
    return c;
}

void add_pair(StructureClass& c, double value, Vector v, std::string name)
{
    c.eigenpairs.push_back({value, std::move(v), std::move(name)});
}

void add_combination(StructureClass& c, Vector v, std::string name)
{
    c.combination_vectors.push_back(std::move(v));
    c.combination_names.push_back(std::move(name));
}

Vector canonical3(double a, double b, double c) { return {a, b, c}; }

Match match_two_triangular(const Matrix& rc, const std::vector<std::size_t>& perm)
{
    if (!is_zero(rc(1, 0)) || is_zero(rc(0, 1))) {
        return {};
    }
    const double s = rc(0, 0);
    if (!in_open_unit(s)) {
        return {std::nullopt, "triangular two-color matrix needs 0 < s < 1"};
    }
    auto c = start(Family::TwoTriangular, 2, perm);
    c.s = s;
    c.xi = {1.0, 0.0};
    add_pair(c, 1.0, ones(2), "1");
    add_pair(c, s, c.embed(c.xi, 0), "xi");
    add_combination(c, ones(2), "C_n.1");
    add_combination(c, c.embed(c.xi, 0), "W_n");
    return {c, {}};
}

Match match_two_irreducible(const Matrix& rc, const std::vector<std::size_t>& perm)
{
    if (!irreducible2(rc)) {
        return {};
    }
    const auto e = eigenpair_2x2(rc);
    if (e.periodic) {
        return {std::nullopt, "irreducible two-color matrix is periodic (lambda = -1)"};
    }
    auto c = start(Family::TwoIrreducible, 2, perm);
    c.lambda = e.lambda;
    c.xi = e.xi;
    c.pi_R = c.to_original(stationary_2x2(rc).pi);
    add_pair(c, 1.0, ones(2), "1");
    add_pair(c, e.lambda, c.embed(c.xi, 0), "xi");
    add_combination(c, ones(2), "C_n.1");
    add_combination(c, c.embed(c.xi, 0), "C_n.xi");
    return {c, {}};
}

Match match_three_one_dominant(const Matrix& rc, const std::vector<std::size_t>& perm)
{
    if (!is_zero(rc(2, 0)) || !is_zero(rc(2, 1))) {
        return {};
    }
    const double s = rc(0, 0) + rc(0, 1);
    if (std::abs(s - (rc(1, 0) + rc(1, 1))) > kTie) {
        return {};
    }
    if (!in_open_unit(s)) {
        return {std::nullopt, "one-dominant three-color matrix needs 0 < s < 1"};
    }
    const Matrix q = block2(rc, 0, 0, s);
    if (!irreducible2(q)) {
        return {std::nullopt, "non-dominant block Q is reducible"};
    }
    const auto e = eigenpair_2x2(q);
    if (e.periodic) {
        return {std::nullopt, "non-dominant block Q is periodic (lambda = -1)"};
    }
    auto c = start(Family::ThreeOneDominant, 3, perm);
    c.s = s;
    c.lambda = e.lambda;
    c.xi = e.xi;
    c.pi_Q = stationary_2x2(q).pi;
    const Vector s1 = c.embed({1.0, 1.0}, 0);
    const Vector sxi = c.embed(c.xi, 0);
    add_pair(c, 1.0, ones(3), "1");
    add_pair(c, s, s1, "S.1");
    add_pair(c, s * e.lambda, sxi, "S.xi");
    add_combination(c, ones(3), "C_n.1");
    add_combination(c, s1, "S_n.1");
    add_combination(c, sxi, "S_n.xi");
    return {c, {}};
}

Match match_three_two_dominant(const ReplacementSpec& spec, const Matrix& rc,
                               const std::vector<std::size_t>& perm)
{
    if (!is_zero(rc(1, 0)) || !is_zero(rc(2, 0))) {
        return {};
    }
    const double s = rc(0, 0);
    if (!in_open_unit(s)) {
        return {std::nullopt, "two-dominant three-color matrix needs 0 < s < 1"};
    }
    const Matrix pm = block2(rc, 1, 1);
    if (!irreducible2(pm)) {
        return {std::nullopt, "dominant block P is reducible"};
    }
    const auto e = eigenpair_2x2(pm);
    const Vector p{rc(0, 1) / (1.0 - s), rc(0, 2) / (1.0 - s)};
    const Vector pi_p = stationary_2x2(pm).pi;
    const double p_xi = dot(p, e.xi);

    const bool repeated = std::abs(e.lambda - s) <= kTie;
    const bool jordan = repeated && std::abs(p_xi) > kTie;
    auto c = start(jordan ? Family::ThreeTwoDominantJordan : Family::ThreeTwoDominantDiag, 3, perm);
    c.s = s;
    c.lambda = e.lambda;
    c.xi = e.xi;
    c.p = p;
    c.pi_P = pi_p;
    c.periodic_P = e.periodic;
    const Vector t1 = c.to_original(canonical3(1.0, 0.0, 0.0));
    add_pair(c, 1.0, ones(3), "1");
    add_pair(c, s, t1, "t1");
    add_combination(c, ones(3), "C_n.1");
    add_combination(c, t1, "W_n");
    if (jordan) {
        c.jordan = jordan_basis(spec, c);
        add_combination(c, c.jordan->T.column(1), "C_n.t2");
        return {c, {}};
    }
    Vector v2;
    if (repeated) {
        if (max_abs(Vector{p[0] - pi_p[0], p[1] - pi_p[1]}) > kTie) {
            fail(ErrorCode::Internal, "p orthogonal to xi but different from pi_P");
        }
        v2 = c.to_original(canonical3(0.0, e.xi[0], e.xi[1]));
    } else {
        const double head = (1.0 - s) * p_xi / (e.lambda - s);
        v2 = c.to_original(canonical3(head, e.xi[0], e.xi[1]));
    }
    add_pair(c, e.lambda, v2, "v2");
    add_combination(c, v2, "C_n.v2");
    return {c, {}};
}

Match match_four_block(const ReplacementSpec& spec, const Matrix& rc, const std::vector<std::size_t>& perm)
{
    if (!is_zero(rc(2, 0)) || !is_zero(rc(2, 1)) || !is_zero(rc(3, 0)) || !is_zero(rc(3, 1))) {
        return {};
    }
    const double s = rc(0, 0) + rc(0, 1);
    if (std::abs(s - (rc(1, 0) + rc(1, 1))) > kTie) {
        return {std::nullopt, "top-left block rows have unequal sums"};
    }
    if (!in_open_unit(s)) {
        return {std::nullopt, "four-color block matrix needs 0 < s < 1"};
    }
    const Matrix q = block2(rc, 0, 0, s);
    const Matrix pm = block2(rc, 2, 2);
    if (!irreducible2(q)) {
        return {std::nullopt, "non-dominant block Q is reducible"};
    }
    if (!irreducible2(pm)) {
        return {std::nullopt, "dominant block P is reducible"};
    }
    const auto eq = eigenpair_2x2(q);
    const auto ep = eigenpair_2x2(pm);
    if (eq.periodic) {
        return {std::nullopt, "non-dominant block Q is periodic (lambda = -1)"};
    }
    if (ep.periodic) {
        return {std::nullopt, "dominant block P is periodic (beta = -1)"};
    }
    const double lambda = eq.lambda;
    const double beta = ep.lambda;
    const Matrix e = block2(rc, 0, 2);
    const Vector e_nu = e * ep.xi;

    const bool tie_s = std::abs(beta - s) <= kTie;
    const bool tie_slambda = std::abs(beta - s * lambda) <= kTie;
    const bool repeated = tie_s || tie_slambda;
    const Vector pi_q = stationary_2x2(q).pi;
    if (repeated) {
        const Vector left = tie_s ? pi_q : Vector{1.0, -1.0};
        if (std::abs(dot(left, e_nu)) <= kTie) {
            return {std::nullopt, "four-color matrix is diagonalizable with a repeated eigenvalue"};
        }
    }
    auto c = start(repeated ? Family::FourBlockJordan : Family::FourBlockDiag, 4, perm);
    c.s = s;
    c.lambda = lambda;
    c.beta = beta;
    c.xi = eq.xi;
    c.pi_Q = pi_q;
    c.pi_P = stationary_2x2(pm).pi;
    const Vector v1 = c.to_original({1.0, 1.0, 0.0, 0.0});
    const Vector v2 = c.to_original({eq.xi[0], eq.xi[1], 0.0, 0.0});
    add_pair(c, 1.0, ones(4), "1");
    add_pair(c, s, v1, "v1");
    add_pair(c, s * lambda, v2, "v2");
    add_combination(c, ones(4), "C_n.1");
    add_combination(c, v1, "C_n.v1");
    add_combination(c, v2, "C_n.v2");
    if (repeated) {
        c.jordan = jordan_basis(spec, c);
        const Vector t3 = c.jordan->T.column(2);
        c.nu = {t3[c.permutation[2]], t3[c.permutation[3]]};
        add_combination(c, t3, "C_n.t3");
        return {c, {}};
    }
    // (beta I - sQ) x = E nu
    const Matrix a{{beta - rc(0, 0), -rc(0, 1)}, {-rc(1, 0), beta - rc(1, 1)}};
    const Vector x = solve2(a, e_nu);
    c.nu = ep.xi;
    const Vector v3 = c.to_original({x[0], x[1], ep.xi[0], ep.xi[1]});
    add_pair(c, beta, v3, "v3");
    add_combination(c, v3, "C_n.v3");
    return {c, {}};
}

} // namespace

std::string_view to_string(Family f)
{
    switch (f) {
    case Family::Identity: return "Identity";
    case Family::TwoIrreducible: return "TwoIrreducible";
    case Family::TwoTriangular: return "TwoTriangular";
    case Family::ThreeOneDominant: return "ThreeOneDominant";
    case Family::ThreeTwoDominantDiag: return "ThreeTwoDominantDiag";
    case Family::ThreeTwoDominantJordan: return "ThreeTwoDominantJordan";
    case Family::FourBlockDiag: return "FourBlockDiag";
    case Family::FourBlockJordan: return "FourBlockJordan";
    case Family::Unsupported: return "Unsupported";
    }
    return "Unsupported";
}

bool is_jordan(Family f) { return f == Family::ThreeTwoDominantJordan || f == Family::FourBlockJordan; }

Vector StructureClass::to_original(const Vector& canonical) const
{
    Vector out(canonical.size(), 0.0);
    for (std::size_t c = 0; c < canonical.size(); ++c) {
        out[permutation[c]] = canonical[c];
    }
    return out;
}

Vector StructureClass::embed(const Vector& block, std::size_t offset) const
{
    Vector canonical(colors, 0.0);
    for (std::size_t i = 0; i < block.size(); ++i) {
        canonical[offset + i] = block[i];
    }
    return to_original(canonical);
}

Vector normalize_eigvec(const Vector& v)
{
    const double m = max_abs(v);
    if (!(m > 0.0)) {
        fail(ErrorCode::InvalidArgument, "cannot normalize the zero vector");
    }
    double sign = 1.0;
    for (double x : v) {
        if (std::abs(x) > kZero * m) {
            sign = x > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] * sign / m;
    }
    return out;
}

Eigen2 eigenpair_2x2(const Matrix& m)
{
    if (m.rows() != 2 || m.cols() != 2) {
        fail(ErrorCode::InvalidArgument, "eigenpair_2x2 needs a 2x2 matrix");
    }
    const double a = m(0, 1);
    const double b = m(1, 0);
    if (is_zero(a) && is_zero(b)) {
        fail(ErrorCode::Domain, "identity block has no non-principal eigenpair");
    }
    Eigen2 out;
    out.lambda = m(0, 0) + m(1, 1) - 1.0;
    // M - lambda I = [[b, a], [b, a]], whose null space is spanned by (a, -b).
    out.xi = normalize_eigvec({a, -b});
    out.periodic = std::abs(out.lambda + 1.0) <= kTie;
    return out;
}

Stationary2 stationary_2x2(const Matrix& m)
{
    if (m.rows() != 2 || m.cols() != 2) {
        fail(ErrorCode::InvalidArgument, "stationary_2x2 needs a 2x2 matrix");
    }
    const double a = m(0, 1);
    const double b = m(1, 0);
    if (is_zero(a) && is_zero(b)) {
        fail(ErrorCode::Domain, "identity block has no unique stationary distribution");
    }
    return {{b / (a + b), a / (a + b)}, std::abs(m(0, 0) + m(1, 1)) > kTie};
}

StructureClass classify(const ReplacementSpec& spec)
{
    const std::size_t k = spec.colors();
    const Matrix& r = spec.replacement();
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    if (max_abs_diff(r, Matrix::identity(k)) <= kZero) {
        auto c = start(Family::Identity, k, perm);
        add_pair(c, 1.0, ones(k), "1");
        add_combination(c, ones(k), "C_n.1");
        for (std::size_t i = 0; i < k; ++i) {
            add_pair(c, 1.0, unit(k, i), "e" + std::to_string(i));
            if (i + 1 < k) {
                add_combination(c, unit(k, i), "C_n," + std::to_string(i));
            }
        }
        return c;
    }
    if (k < 2 || k > 4) {
        auto c = start(Family::Unsupported, k, perm);
        c.reason = "regime prediction covers 2 to 4 colors";
        return c;
    }

    std::string reason;
    std::optional<StructureClass> found;
    do {
        const Matrix rc = permuted(r, perm);
        std::vector<Match> tries;
        if (k == 2) {
            tries.push_back(match_two_triangular(rc, perm));
            tries.push_back(match_two_irreducible(rc, perm));
        } else if (k == 3) {
            tries.push_back(match_three_one_dominant(rc, perm));
            tries.push_back(match_three_two_dominant(spec, rc, perm));
        } else {
            tries.push_back(match_four_block(spec, rc, perm));
        }
        for (auto& t : tries) {
            if (t.cls) {
                found = std::move(t.cls);
                break;
            }
            if (reason.empty()) {
                reason = t.reason;
            }
        }
    } while (!found && std::next_permutation(perm.begin(), perm.end()));

    if (!found) {
        auto c = start(Family::Unsupported, k, std::vector<std::size_t>(k));
        std::iota(c.permutation.begin(), c.permutation.end(), std::size_t{0});
        c.reason = reason.empty() ? "matrix is outside the supported reducible families" : reason;
        return c;
    }

    // The non-dominant colors must start with positive mass, otherwise the
    // limit variables collapse to zero.
    std::size_t non_dominant = 0;
    switch (found->family) {
    case Family::TwoTriangular:
    case Family::ThreeTwoDominantDiag:
    case Family::ThreeTwoDominantJordan: non_dominant = 1; break;
    case Family::ThreeOneDominant:
    case Family::FourBlockDiag:
    case Family::FourBlockJordan: non_dominant = 2; break;
    default: break;
    }
    if (non_dominant > 0) {
        double mass = 0.0;
        for (std::size_t c = 0; c < non_dominant; ++c) {
            mass += spec.initial()[found->permutation[c]];
        }
        if (!(mass > 0.0)) {
            fail(ErrorCode::Domain, "C0 must give positive mass to at least one non-dominant color");
        }
    }
    return *found;
}

JordanBasis jordan_basis(const ReplacementSpec& spec, const StructureClass& cls)
{
    if (!is_jordan(cls.family)) {
        fail(ErrorCode::InvalidArgument, std::string("family ") + std::string(to_string(cls.family)) +
                                             " has no Jordan basis");
    }
    const Matrix rc = permuted(spec.replacement(), cls.permutation);
    const double s = cls.s.value();
    JordanBasis out;
    std::vector<Vector> columns;
    if (cls.family == Family::ThreeTwoDominantJordan) {
        // R t2 = t1 + s t2 fixes the scale of the lower part: (1 - s) p.xi = 1.
        const double scale = (1.0 - s) * dot(cls.p, cls.xi);
        columns = {canonical3(1.0, 0.0, 0.0), canonical3(0.0, cls.xi[0] / scale, cls.xi[1] / scale), ones(3)};
        out.J = Matrix{{s, 1.0, 0.0}, {0.0, s, 0.0}, {0.0, 0.0, 1.0}};
    } else {
        const double lambda = cls.lambda.value();
        const double beta = cls.beta.value();
        const Matrix q = block2(rc, 0, 0, s);
        const Matrix e = block2(rc, 0, 2);
        const Vector nu_hat = eigenpair_2x2(block2(rc, 2, 2)).xi;
        const Vector xi = cls.xi;
        const bool tie_s = std::abs(beta - s) <= kTie;
        const double alpha = tie_s ? s * lambda : s;
        const Vector v1{1.0, 1.0, 0.0, 0.0};
        const Vector v2{xi[0], xi[1], 0.0, 0.0};
        const Vector& t1 = tie_s ? v2 : v1;
        const Vector& t2 = tie_s ? v1 : v2;
        const Vector left = tie_s ? stationary_2x2(q).pi : Vector{1.0, -1.0};
        const Vector top{t2[0], t2[1]};
        const Vector e_nu = e * nu_hat;
        // Only one scale of nu makes (sQ - beta I) x = t2_top - kappa E nu solvable.
        const double kappa = dot(left, top) / dot(left, e_nu);
        const Matrix a{{rc(0, 0) - beta, rc(0, 1)}, {rc(1, 0), rc(1, 1) - beta}};
        const Vector x = solve_rank1(a, {top[0] - kappa * e_nu[0], top[1] - kappa * e_nu[1]});
        columns = {t1, t2, {x[0], x[1], kappa * nu_hat[0], kappa * nu_hat[1]}, ones(4)};
        out.J = Matrix{{alpha, 0.0, 0.0, 0.0}, {0.0, beta, 1.0, 0.0}, {0.0, 0.0, beta, 0.0}, {0.0, 0.0, 0.0, 1.0}};
    }
    const std::size_t k = columns.size();
    out.T = Matrix(k, k);
    for (std::size_t j = 0; j < k; ++j) {
        const Vector col = cls.to_original(columns[j]);
        for (std::size_t i = 0; i < k; ++i) {
            out.T(i, j) = col[i];
        }
    }
    const double residual = max_abs_diff(spec.replacement() * out.T, out.T * out.J);
    if (!(residual < kResidualTol)) {
        fail(ErrorCode::Internal, "generalized eigenvector equation is inconsistent (residual " +
                                      std::to_string(residual) + ")");
    }
    return out;
}

double spectral_residual(const ReplacementSpec& spec, const StructureClass& cls)
{
    double worst = 0.0;
    for (const auto& pair : cls.eigenpairs) {
        const Vector rv = spec.replacement() * pair.vector;
        for (std::size_t i = 0; i < rv.size(); ++i) {
            worst = std::max(worst, std::abs(rv[i] - pair.value * pair.vector[i]));
        }
    }
    if (cls.jordan) {
        worst = std::max(worst, max_abs_diff(spec.replacement() * cls.jordan->T, cls.jordan->T * cls.jordan->J));
    }
    return worst;
}

} // namespace urnlab
