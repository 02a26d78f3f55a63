#pragma once

// Small dense complex linear algebra built around the N-dimensional cross
// product. Everything here works on matrices of order at most kMaxArity.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "bandframe/errors.hpp"
#include "bandframe/types.hpp"

namespace bandframe {

inline constexpr int kMaxArity = 8;

/// Relative cutoff below which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-8;

namespace detail {

inline void check_arity(Eigen::Index n, const char* what)
{
    if (n > kMaxArity) {
        throw UnsupportedArity(std::string(what) + ": dimension " + std::to_string(n) +
                               " exceeds the supported maximum of " + std::to_string(kMaxArity));
    }
}

} // namespace detail

/// Determinant by Gaussian elimination with partial pivoting.
inline Complex determinant(ComplexMatrix m)
{
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("determinant of a non-square matrix");
    }
    const Eigen::Index n = m.rows();
    Complex det{1.0, 0.0};
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index pivot = c;
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (std::abs(m(r, c)) > std::abs(m(pivot, c))) pivot = r;
        }
        if (m(pivot, c) == Complex{0.0, 0.0}) {
            return {0.0, 0.0};
        }
        if (pivot != c) {
            m.row(pivot).swap(m.row(c));
            det = -det;
        }
        det *= m(c, c);
        for (Eigen::Index r = c + 1; r < n; ++r) {
            const Complex f = m(r, c) / m(c, c);
            m.row(r).tail(n - c) -= f * m.row(c).tail(n - c);
        }
    }
    return det;
}

/// Formal determinant with the canonical basis as symbolic first row.
/// Component k (0-based) is (-1)^k times the minor of the stacked arguments with column k removed.
/// Bilinear, not sesquilinear: no argument is conjugated.
inline ComplexVector cross_product(std::span<const ComplexVector> vectors)
{
    const auto n = static_cast<Eigen::Index>(vectors.size()) + 1;
    if (n < 2) {
        throw DimensionMismatch("cross_product needs at least one vector");
    }
    detail::check_arity(n, "cross_product");
    for (const auto& v : vectors) {
        if (v.size() != n) {
            throw DimensionMismatch("cross_product: " + std::to_string(n - 1) + " vectors must have dimension " +
                                    std::to_string(n) + ", got " + std::to_string(v.size()));
        }
    }
    ComplexVector out(n);
    ComplexMatrix minor(n - 1, n - 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index r = 0; r < n - 1; ++r) {
            Eigen::Index c2 = 0;
            for (Eigen::Index c = 0; c < n; ++c) {
                if (c == k) continue;
                minor(r, c2++) = vectors[static_cast<std::size_t>(r)](c);
            }
        }
        out(k) = ((k % 2 == 0) ? 1.0 : -1.0) * determinant(minor);
    }
    return out;
}

inline ComplexVector cross_product(std::initializer_list<ComplexVector> vectors)
{
    const std::vector<ComplexVector> v(vectors);
    return cross_product(std::span<const ComplexVector>(v));
}

/// Inverse through cofactors: column k of M^{-1} is (-1)^k det(M)^{-1} times the cross product of the other rows.
inline ComplexMatrix cofactor_inverse(const ComplexMatrix& m)
{
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("cofactor_inverse of a non-square matrix");
    }
    const Eigen::Index n = m.rows();
    detail::check_arity(n, "cofactor_inverse");
    const Complex det = determinant(m);
    const double scale = std::pow(m.norm(), static_cast<double>(n));
    if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(std::abs(det))) {
        throw SingularMatrix("cofactor_inverse: |det| = " + std::to_string(std::abs(det)) + " is numerically zero");
    }
    if (n == 1) {
        return ComplexMatrix::Constant(1, 1, 1.0 / m(0, 0));
    }
    ComplexMatrix inv(n, n);
    std::vector<ComplexVector> rows;
    rows.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index k = 0; k < n; ++k) {
        rows.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != k) rows.emplace_back(m.row(j).transpose());
        }
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        inv.col(k) = (sign / det) * cross_product(std::span<const ComplexVector>(rows));
    }
    return inv;
}

namespace detail {

inline void check_tall(const ComplexMatrix& a, const char* what)
{
    if (a.rows() != a.cols() + 1 || a.cols() < 1) {
        throw DimensionMismatch(std::string(what) + ": expected an n x (n-1) matrix, got " +
                                std::to_string(a.rows()) + " x " + std::to_string(a.cols()));
    }
    check_arity(a.rows(), what);
}

inline std::vector<ComplexVector> conjugated_columns(const ComplexMatrix& a)
{
    std::vector<ComplexVector> cols;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        cols.emplace_back(a.col(c).conjugate());
    }
    return cols;
}

inline void check_full_column_rank(const ComplexMatrix& a, const char* what)
{
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(s.size() - 1) > kRankTolerance * s(0))) {
        throw RankDeficient(std::string(what) + ": matrix does not have full column rank");
    }
}

} // namespace detail

/// (A*A)^{-1} A* for a tall full-rank A, via a library LU solve.
inline ComplexMatrix mp_inverse_normal(const ComplexMatrix& a)
{
    detail::check_full_column_rank(a, "mp_inverse_normal");
    const ComplexMatrix adj = a.adjoint();
    return (adj * a).partialPivLu().solve(adj);
}

/// Border A with W = cross product of its conjugated columns, invert, keep the first n-1 rows.
inline ComplexMatrix mp_inverse_bordered(const ComplexMatrix& a)
{
    detail::check_tall(a, "mp_inverse_bordered");
    detail::check_full_column_rank(a, "mp_inverse_bordered");
    const auto cols = detail::conjugated_columns(a);
    const ComplexVector w = cross_product(std::span<const ComplexVector>(cols));
    ComplexMatrix bordered(a.rows(), a.rows());
    bordered << a, w;
    return cofactor_inverse(bordered).topRows(a.cols());
}

/// Rows of A^{+} directly as cross products:
/// row k = -|W|^{-2} times the cross product of the columns of A with column k replaced by W.
inline ComplexMatrix mp_inverse_rows(const ComplexMatrix& a)
{
    detail::check_tall(a, "mp_inverse_rows");
    detail::check_full_column_rank(a, "mp_inverse_rows");
    const auto conj_cols = detail::conjugated_columns(a);
    const ComplexVector w = cross_product(std::span<const ComplexVector>(conj_cols));
    const double w2 = w.squaredNorm();
    ComplexMatrix out(a.cols(), a.rows());
    std::vector<ComplexVector> cols;
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        cols.clear();
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            cols.emplace_back(c == k ? w : ComplexVector(a.col(c)));
        }
        out.row(k) = (-1.0 / w2) * cross_product(std::span<const ComplexVector>(cols)).transpose();
    }
    return out;
}

/// Moore-Penrose inverse of a tall n x (n-1) matrix. Computes both the normal-equation and the
/// bordered construction and refuses to answer if they disagree beyond 1e-10 (relative).
inline ComplexMatrix mp_inverse_tall(const ComplexMatrix& a)
{
    detail::check_tall(a, "mp_inverse_tall");
    const ComplexMatrix normal = mp_inverse_normal(a);
    const ComplexMatrix bordered = mp_inverse_bordered(a);
    const double scale = std::max(1.0, normal.norm());
    if ((normal - bordered).norm() > 1e-10 * scale) {
        throw RankDeficient("mp_inverse_tall: the two constructions disagree; A is too ill-conditioned");
    }
    return bordered;
}

/// Sum over all maximal minors of |minor|^2 (the Cauchy-Binet expansion of det(AA*) or det(A*A)).
inline double minor_sum(const ComplexMatrix& a)
{
    const bool wide = a.rows() <= a.cols();
    const ComplexMatrix m = wide ? a : ComplexMatrix(a.transpose());
    const Eigen::Index k = m.rows();
    const Eigen::Index n = m.cols();
    if (k == 0) return 1.0;
    detail::check_arity(n, "minor_sum");
    std::vector<Eigen::Index> pick(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    double total = 0.0;
    ComplexMatrix sub(k, k);
    while (true) {
        for (Eigen::Index c = 0; c < k; ++c) sub.col(c) = m.col(pick[static_cast<std::size_t>(c)]);
        total += std::norm(determinant(sub));
        Eigen::Index i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < k; ++j) {
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return total;
}

struct SingularProfile {
    std::vector<double> singular_values;
    int numerical_rank = 0;
    /// Only meaningful for square input; 0 otherwise.
    double det_modulus = 0.0;
    double minor_sum = 0.0;
};

inline SingularProfile singular_profile(const ComplexMatrix& a)
{
    SingularProfile p;
    if (a.size() == 0) return p;
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const auto& s = svd.singularValues();
    p.singular_values.assign(s.data(), s.data() + s.size());
    const double cutoff = kRankTolerance * (s.size() ? s(0) : 0.0);
    p.numerical_rank = static_cast<int>(std::ranges::count_if(p.singular_values, [&](double v) {
        return v > 0.0 && v >= cutoff;
    }));
    if (a.rows() == a.cols()) p.det_modulus = std::abs(determinant(a));
    p.minor_sum = minor_sum(a);
    return p;
}

} // namespace bandframe
