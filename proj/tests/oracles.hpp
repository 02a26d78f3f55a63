#pragma once

// Brute-force reference computations for the tests. Nothing here calls the
// library's own linear algebra or dual routines.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Number of shifts j with |x + j h| <= omega.
inline int range_dimension(double x, double omega, double h)
{
    int count = 0;
    const int reach = static_cast<int>(std::ceil(2.0 * omega / h)) + 2;
    for (int j = -reach; j <= reach; ++j) {
        if (std::abs(x + j * h) <= omega) ++count;
    }
    return count;
}

/// Laplace expansion along the first row.
inline C laplace_det(const Mat& m)
{
    const auto n = m.rows();
    if (n == 1) return m(0, 0);
    C det{0.0, 0.0};
    for (Eigen::Index c = 0; c < n; ++c) {
        Mat minor(n - 1, n - 1);
        for (Eigen::Index r = 1; r < n; ++r) {
            Eigen::Index cc = 0;
            for (Eigen::Index k = 0; k < n; ++k) {
                if (k != c) minor(r - 1, cc++) = m(r, k);
            }
        }
        det += ((c % 2 == 0) ? 1.0 : -1.0) * m(0, c) * laplace_det(minor);
    }
    return det;
}

/// Moore-Penrose inverse from a full SVD.
inline Mat svd_pinv(const Mat& a)
{
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Mat sinv = Mat::Zero(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-12 * s(0)) sinv(i, i) = 1.0 / s(i);
    }
    return svd.matrixV() * sinv * svd.matrixU().adjoint();
}

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    // Entries uniform in the unit disk.
    std::uniform_real_distribution<double> r(0.0, 1.0);
    std::uniform_real_distribution<double> t(0.0, 2.0 * M_PI);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = std::polar(std::sqrt(r(rng)), t(rng));
    }
    return m;
}

/// Canonical dual at band frequency y, straight from the definition: fiber
/// J (rows = in-band shifts, cols = generators), dual fiber = pinv(J*).
inline Vec dual_by_svd(const std::vector<std::function<C(double)>>& gens, double omega, double h, double y)
{
    const double x = y - std::floor(y / h) * h;
    const int jy = static_cast<int>(std::floor(y / h));
    std::vector<int> shifts;
    const int reach = static_cast<int>(std::ceil(2.0 * omega / h)) + 2;
    for (int j = -reach; j <= reach; ++j) {
        if (std::abs(x + j * h) < omega) shifts.push_back(j);
    }
    Mat jm(static_cast<Eigen::Index>(shifts.size()), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t r = 0; r < shifts.size(); ++r) {
        for (std::size_t c = 0; c < gens.size(); ++c) {
            jm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::sqrt(h) * gens[c](x + shifts[r] * h);
        }
    }
    const Mat jd = svd_pinv(jm.adjoint());
    Vec out = Vec::Zero(static_cast<Eigen::Index>(gens.size()));
    for (std::size_t r = 0; r < shifts.size(); ++r) {
        if (shifts[r] == jy) out = jd.row(static_cast<Eigen::Index>(r)).transpose() / std::sqrt(h);
    }
    return out;
}

/// Composite Simpson on [a, b] for a smooth complex integrand.
inline C simpson(const std::function<C(double)>& f, double a, double b, int panels = 20000)
{
    const double hstep = (b - a) / panels;
    C sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * hstep);
    return sum * hstep / 3.0;
}

} // namespace oracle
