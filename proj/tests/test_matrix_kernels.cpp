#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "bandframe/bandframe.hpp"
#include "oracles.hpp"

using namespace bandframe;

namespace {

ComplexVector vec(std::initializer_list<Complex> v)
{
    ComplexVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& c : v) out(i++) = c;
    return out;
}

constexpr Complex I{0.0, 1.0};

} // namespace

TEST(CrossProduct, BasisVectors)
{
    const ComplexVector e1 = vec({1, 0, 0});
    const ComplexVector e2 = vec({0, 1, 0});
    EXPECT_NEAR((cross_product({e1, e2}) - vec({0, 0, 1})).norm(), 0.0, 1e-15);
    EXPECT_NEAR((cross_product({e2, e1}) - vec({0, 0, -1})).norm(), 0.0, 1e-15);
}

TEST(CrossProduct, TwoDimensionalPerp)
{
    EXPECT_NEAR((cross_product({vec({1, I})}) - vec({I, -1.0})).norm(), 0.0, 1e-15);
}

TEST(CrossProduct, RejectsBadShapes)
{
    EXPECT_THROW(cross_product({vec({1, 0, 0}), vec({0, 1})}), DimensionMismatch);
    std::vector<ComplexVector> nine(8, ComplexVector::Zero(9));
    EXPECT_THROW(cross_product(std::span<const ComplexVector>(nine)), UnsupportedArity);
}

TEST(CrossProduct, MatchesLaplaceMinors)
{
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 6; ++n) {
        const oracle::Mat u = oracle::random_matrix(rng, n - 1, n);
        std::vector<ComplexVector> rows;
        for (int r = 0; r < n - 1; ++r) rows.emplace_back(u.row(r).transpose());
        const ComplexVector w = cross_product(std::span<const ComplexVector>(rows));
        for (int k = 0; k < n; ++k) {
            oracle::Mat minor(n - 1, n - 1);
            for (int r = 0; r < n - 1; ++r) {
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c != k) minor(r, cc++) = u(r, c);
                }
            }
            const Complex expect = (k % 2 == 0 ? 1.0 : -1.0) * oracle::laplace_det(minor);
            EXPECT_NEAR(std::abs(w(k) - expect), 0.0, 1e-12);
        }
    }
}

TEST(CrossProduct, BilinearOrthogonalityProperty)
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = dim(rng);
        const oracle::Mat u = oracle::random_matrix(rng, n - 1, n);
        std::vector<ComplexVector> rows;
        for (int r = 0; r < n - 1; ++r) rows.emplace_back(u.row(r).transpose());
        const ComplexVector w = cross_product(std::span<const ComplexVector>(rows));
        for (const auto& r : rows) {
            // sum_i w_i u_i, no conjugation: a determinant with a repeated row.
            ASSERT_NEAR(std::abs((w.array() * r.array()).sum()), 0.0, 1e-12) << "n = " << n;
        }
    }
}

TEST(CrossProduct, AntisymmetricUnderSwap)
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const oracle::Mat u = oracle::random_matrix(rng, 3, 4);
        const ComplexVector a = u.row(0).transpose();
        const ComplexVector b = u.row(1).transpose();
        const ComplexVector c = u.row(2).transpose();
        EXPECT_NEAR((cross_product({a, b, c}) + cross_product({b, a, c})).norm(), 0.0, 1e-13);
    }
}

TEST(CofactorInverse, Examples)
{
    EXPECT_NEAR((cofactor_inverse(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)).norm(), 0.0,
                1e-15);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = I;
    ComplexMatrix d_inv = ComplexMatrix::Zero(2, 2);
    d_inv(0, 0) = 0.5;
    d_inv(1, 1) = -I;
    EXPECT_NEAR((cofactor_inverse(d) - d_inv).norm(), 0.0, 1e-15);
}

TEST(CofactorInverse, DerivativeFiberAtHalf)
{
    ComplexMatrix m(2, 2);
    m << 1.0, I * (0.5 - 1.0), 1.0, I * 0.5;
    EXPECT_NEAR(std::abs(determinant(m) - I), 0.0, 1e-15);
    ComplexMatrix expect(2, 2);
    // inverse = (1/det) [[d, -b], [-c, a]]
    expect << I * 0.5 / I, -(I * -0.5) / I, -1.0 / I, 1.0 / I;
    EXPECT_NEAR((cofactor_inverse(m) - expect).norm(), 0.0, 1e-15);
}

TEST(CofactorInverse, SingularThrows)
{
    ComplexMatrix m(2, 2);
    m << 1.0, 2.0, 2.0, 4.0;
    EXPECT_THROW(cofactor_inverse(m), SingularMatrix);
}

TEST(CofactorInverse, AgreesWithLuProperty)
{
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = dim(rng);
        const oracle::Mat m = oracle::random_matrix(rng, n, n) + 2.0 * oracle::Mat::Identity(n, n);
        const ComplexMatrix inv = cofactor_inverse(m);
        const oracle::Mat ref = m.inverse();
        ASSERT_LE((inv - ref).norm(), 1e-11 * ref.norm()) << "n = " << n;
        ASSERT_LE((inv * m - ComplexMatrix::Identity(n, n)).norm(), 1e-10);
    }
}

TEST(PseudoInverse, Examples)
{
    ComplexMatrix a(2, 1);
    a << 1.0, 0.0;
    ComplexMatrix e(1, 2);
    e << 1.0, 0.0;
    EXPECT_NEAR((mp_inverse_tall(a) - e).norm(), 0.0, 1e-15);
    a << 1.0, 1.0;
    e << 0.5, 0.5;
    EXPECT_NEAR((mp_inverse_tall(a) - e).norm(), 0.0, 1e-15);
    ComplexMatrix b(3, 2);
    b << 1, 0, 0, 1, 0, 0;
    ComplexMatrix f(2, 3);
    f << 1, 0, 0, 0, 1, 0;
    EXPECT_NEAR((mp_inverse_tall(b) - f).norm(), 0.0, 1e-15);
}

TEST(PseudoInverse, RankDeficientThrows)
{
    ComplexMatrix a(3, 2);
    a << 1, 2, 2, 4, 3, 6;
    EXPECT_THROW(mp_inverse_tall(a), RankDeficient);
    EXPECT_THROW(mp_inverse_tall(ComplexMatrix::Zero(3, 3)), DimensionMismatch);
}

TEST(PseudoInverse, ConstructionsAgreeProperty)
{
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = dim(rng);
        const oracle::Mat a = oracle::random_matrix(rng, n, n - 1);
        const ComplexMatrix normal = mp_inverse_normal(a);
        const ComplexMatrix bordered = mp_inverse_bordered(a);
        const ComplexMatrix rows = mp_inverse_rows(a);
        const double scale = std::max(1.0, normal.norm());
        ASSERT_LE((normal - bordered).norm(), 1e-10 * scale) << "n = " << n;
        ASSERT_LE((normal - rows).norm(), 1e-10 * scale) << "n = " << n;
        ASSERT_LE((bordered - oracle::svd_pinv(a)).norm(), 1e-9 * scale) << "n = " << n;
        // Penrose conditions.
        const ComplexMatrix p = a * bordered;
        ASSERT_LE((bordered * a - ComplexMatrix::Identity(n - 1, n - 1)).norm(), 1e-9);
        ASSERT_LE((p - p.adjoint()).norm(), 1e-9);
        ASSERT_LE((p * p - p).norm(), 1e-9);
    }
}

TEST(PseudoInverse, BorderDeterminantIsSignedNormOfW)
{
    std::mt19937_64 rng(16);
    for (int n = 2; n <= 7; ++n) {
        const oracle::Mat a = oracle::random_matrix(rng, n, n - 1);
        std::vector<ComplexVector> cols;
        for (int c = 0; c < n - 1; ++c) cols.emplace_back(a.col(c).conjugate());
        const ComplexVector w = cross_product(std::span<const ComplexVector>(cols));
        ComplexMatrix b(n, n);
        b << a, w;
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        EXPECT_NEAR(std::abs(oracle::laplace_det(b) - sign * w.squaredNorm()), 0.0, 1e-10 * w.squaredNorm());
    }
}

TEST(SingularProfile, Examples)
{
    const SingularProfile id = singular_profile(ComplexMatrix::Identity(2, 2));
    EXPECT_EQ(id.numerical_rank, 2);
    EXPECT_NEAR(id.singular_values[0], 1.0, 1e-15);
    EXPECT_NEAR(id.singular_values[1], 1.0, 1e-15);
    EXPECT_NEAR(id.minor_sum, 1.0, 1e-15);
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    const SingularProfile p = singular_profile(m);
    EXPECT_EQ(p.numerical_rank, 1);
    EXPECT_NEAR(p.singular_values[1], 0.0, 1e-15);
    EXPECT_NEAR(p.minor_sum, 0.0, 1e-15);
}

TEST(SingularProfile, HilbertMiddleFiberIsTight)
{
    // h = 1.5, x in the middle interval: rows sqrt(h) (1, i) at y = x - h < 0 and sqrt(h) (1, -i) at y = x > 0.
    const double h = 1.5;
    ComplexMatrix j(2, 2);
    j << std::sqrt(h), std::sqrt(h) * I, std::sqrt(h), -std::sqrt(h) * I;
    const SingularProfile p = singular_profile(j);
    EXPECT_NEAR(p.singular_values[0], std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(p.singular_values[1], std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(p.det_modulus, 3.0, 1e-14);
}

TEST(SingularProfile, CauchyBinetProperty)
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> rows(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = rows(rng);
        std::uniform_int_distribution<int> cols(r, 8);
        const int c = cols(rng);
        const oracle::Mat a = oracle::random_matrix(rng, r, c);
        const double direct = std::abs(oracle::laplace_det(a * a.adjoint()));
        ASSERT_NEAR(minor_sum(a), direct, 1e-10 * std::max(1.0, direct)) << r << "x" << c;
    }
}

TEST(SingularProfile, FrameBoundSandwichProperty)
{
    std::mt19937_64 rng(18);
    std::uniform_int_distribution<int> rows(1, 5);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rows(rng);
        std::uniform_int_distribution<int> cols(n, 7);
        const int m = cols(rng);
        const oracle::Mat j = oracle::random_matrix(rng, n, m);
        const SingularProfile p = singular_profile(j);
        const double smax = p.singular_values.front();
        const double smin = p.singular_values.back();
        const double op2 = smax * smax;
        const double lower = p.minor_sum * std::pow(op2, 1 - n);
        ASSERT_GE(smin * smin, lower * (1.0 - 1e-10));
        // ||J||^2 is the largest eigenvalue of J J*.
        Eigen::SelfAdjointEigenSolver<oracle::Mat> eig(j * j.adjoint());
        ASSERT_NEAR(op2, eig.eigenvalues()(n - 1), 1e-10 * op2);
    }
}
