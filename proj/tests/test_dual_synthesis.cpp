#include <gtest/gtest.h>

#include <random>

#include "bandframe/bandframe.hpp"
#include "oracles.hpp"

using namespace bandframe;

namespace {

constexpr Complex I{0.0, 1.0};

std::vector<std::function<Complex(double)>> spectra_of(const GeneratorFamily& f)
{
    std::vector<std::function<Complex(double)>> out;
    for (const auto& g : f.generators()) out.push_back(g.as_spectrum());
    return out;
}

double max_gap(const DualEvaluator& a, const DualEvaluator& b, const BandSpec& s, int samples = 2000)
{
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double y = -s.omega + (i + 0.37) * 2.0 * s.omega / samples;
        m = std::max(m, (a(y) - b(y)).cwiseAbs().maxCoeff());
    }
    return m;
}

} // namespace

TEST(DualPointwise, MatchesSvdOracle)
{
    for (double ratio : {1.5, 1.2, 0.7, 11.0 / 15.0, 0.55, 0.45}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = derivative_family(s, s.n_generators);
        const auto gens = spectra_of(f);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t < 300; ++t) {
            const double y = u(rng);
            const ComplexVector got = dual_at(f, y);
            const ComplexVector want = oracle::dual_by_svd(gens, 1.0, s.h, y);
            ASSERT_LT((got - want).norm(), 1e-10 * std::max(1.0, want.norm())) << "ratio " << ratio << " y " << y;
        }
    }
}

TEST(DualPointwise, HilbertIsScaledFamily)
{
    for (double ratio : {1.0, 1.3, 1.5, 1.9}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = hilbert_family(s);
        const DualEvaluator scaled = [&](double y) -> ComplexVector {
            return std::abs(y) < 1.0 ? ComplexVector(f.values(y) / (2.0 * s.h)) : ComplexVector::Zero(2);
        };
        EXPECT_LT(max_gap([&](double y) { return dual_at(f, y); }, scaled, s), 1e-13);
    }
}

TEST(DualPointwise, DerivativeTwoAtHalf)
{
    const GeneratorFamily f = derivative_family(make_band_spec_ratio(1.0, 1.0), 2);
    const ComplexVector v = dual_at(f, 0.5);
    EXPECT_NEAR(std::abs(v(0) - 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(v(1) - I), 0.0, 1e-14);
}

TEST(DualPointwise, BreakpointFrequenciesUseRightLimit)
{
    // y = 0 sits on the fiber cell edge x = 0; y = 0.5 on an interior breakpoint for h = 1.5.
    const GeneratorFamily hil = hilbert_family(make_band_spec_ratio(1.0, 1.5));
    for (double y : {0.5, -0.5}) {
        EXPECT_LT((dual_at(hil, y) - dual_at(hil, y + 1e-12)).norm(), 1e-9) << y;
    }
    const GeneratorFamily d3 = derivative_family(make_band_spec_ratio(1.0, 0.7), 3);
    EXPECT_EQ(to_fiber(d3.spec(), 0.0).x, 0.0);
    EXPECT_LT((dual_at(d3, 0.0) - dual_at(d3, 1e-12)).norm(), 1e-9);
    EXPECT_LT((dual_at(d3, 0.0) - dual_at(d3, -1e-12)).norm(), 1e-9);
}

TEST(DualPointwise, DerivativeThreeAtZero)
{
    const GeneratorFamily f = derivative_family(make_band_spec_ratio(1.0, 2.0 / 3.0), 3);
    const ComplexVector v = dual_at(f, 0.0);
    EXPECT_NEAR(std::abs(v(0) - 1.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(v(1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(v(2) - 3.375), 0.0, 1e-12);
}

TEST(DualScheme, FrozenDerivativeThreeValues)
{
    // Values computed independently from the pseudoinverse of the 2 x 3 fiber at h = 0.7.
    const BandSpec s = make_band_spec_ratio(1.0, 0.7);
    const DualEvaluator e = scheme_evaluator(Scheme::Derivative3, s);
    const ComplexVector a = e(-0.35);
    EXPECT_NEAR(a(0).real(), 0.70372543, 1e-8);
    EXPECT_NEAR(a(1).imag(), -2.04081633, 1e-8);
    EXPECT_NEAR(a(2).real(), -0.08620637, 1e-8);
    const ComplexVector b = e(0.5);
    EXPECT_NEAR(b(0).real(), 0.26239067, 1e-8);
    EXPECT_NEAR(b(1).imag(), 1.60349854, 1e-8);
    EXPECT_NEAR(b(2).real(), -1.45772595, 1e-8);
}

TEST(DualScheme, AgreesWithPointwiseAcrossRange)
{
    struct Case {
        Scheme scheme;
        double ratio;
    };
    for (const Case c : {Case{Scheme::Hilbert, 1.5}, Case{Scheme::Hilbert, 1.0}, Case{Scheme::Derivative2, 1.0},
                         Case{Scheme::Derivative2, 1.5}, Case{Scheme::Derivative2, 1.8},
                         Case{Scheme::Derivative3, 2.0 / 3.0}, Case{Scheme::Derivative3, 0.7},
                         Case{Scheme::Derivative3, 11.0 / 15.0}, Case{Scheme::Derivative3, 0.9}}) {
        const BandSpec s = make_band_spec_ratio(1.0, c.ratio);
        const GeneratorFamily f = scheme_family(c.scheme, s);
        EXPECT_LT(max_gap(scheme_evaluator(c.scheme, s), [&](double y) { return dual_at(f, y); }, s), 1e-11)
            << to_string(c.scheme) << " at " << c.ratio;
    }
}

TEST(DualCrossProduct, AgreesWithPointwiseForTwoThreeFour)
{
    for (double ratio : {1.0, 1.4, 1.99, 2.0 / 3.0, 0.7, 0.8, 0.99, 0.5, 0.55, 0.6, 0.66}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = derivative_family(s, s.n_generators);
        const DualEvaluator cross = cross_product_evaluator(f, s.n_generators);
        EXPECT_LT(max_gap(cross, [&](double y) { return dual_at(f, y); }, s), 1e-10) << "ratio " << ratio;
    }
}

TEST(DualCrossProduct, HilbertFamilyToo)
{
    const BandSpec s = make_band_spec_ratio(1.0, 1.3);
    const GeneratorFamily f = hilbert_family(s);
    EXPECT_LT(max_gap(cross_product_evaluator(f, 2), [&](double y) { return dual_at(f, y); }, s), 1e-12);
}

TEST(DualCrossProduct, SampledFamiliesAgree)
{
    const BandSpec s = make_band_spec_ratio(1.0, 0.7);
    const GeneratorFamily f = derivative_family(s, 3);
    const FrequencyGrid grid = make_frequency_grid(s, 1024);
    const DualFamily pw = duals_pointwise(f, grid);
    const DualFamily cp = duals_closed_form(f, grid, 3);
    EXPECT_EQ(pw.source, "pointwise");
    EXPECT_EQ(cp.source, "cross-product");
    std::size_t in_band = 0;
    for (double x : grid.nodes) {
        for (int j : s.partition[locate(s, x)].active_shifts) in_band += std::abs(x + j * s.h) < 1.0 ? 1 : 0;
    }
    EXPECT_EQ(pw.nodes.size(), in_band);
    EXPECT_LT(max_discrepancy(pw, cp), 1e-10);
}

TEST(DualRiesz, MatchesPointwiseOnRieszBoundary)
{
    for (double ratio : {1.0, 2.0 / 3.0, 0.5}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = derivative_family(s, s.n_generators);
        const FrequencyGrid grid = make_frequency_grid(s, 512);
        EXPECT_LT(max_discrepancy(duals_riesz(f, grid), duals_pointwise(f, grid)), 1e-10) << ratio;
    }
}

TEST(DualRiesz, RejectsNonRieszFrame)
{
    const BandSpec s = make_band_spec_ratio(1.0, 0.7);
    EXPECT_THROW(duals_riesz(derivative_family(s, 3), make_frequency_grid(s, 256)), NotRiesz);
}

TEST(DualErrors, NotFrameAndRegime)
{
    const BandSpec s = make_band_spec_ratio(1.0, 1.5);
    const GeneratorFamily dup(s, {unit_generator(1.0), unit_generator(1.0)}, "duplicate");
    EXPECT_THROW(duals_pointwise(dup, make_frequency_grid(s, 256)), NotFrame);
    EXPECT_THROW(duals_closed_form(dup, make_frequency_grid(s, 256), 2), NotFrame);
    EXPECT_THROW(scheme_family(Scheme::Derivative3, s), InadmissibleRegime);
    EXPECT_THROW(scheme_evaluator(Scheme::Derivative3, s), InadmissibleRegime);
    EXPECT_THROW(builtin_scheme("derivative2", 1.0, 2.0 * kPi / 0.7), InadmissibleRegime);
    EXPECT_THROW(cross_product_evaluator(dup, 3), DimensionMismatch);
    const BandSpec five = make_band_spec_ratio(1.0, 0.45);
    EXPECT_THROW(cross_product_evaluator(derivative_family(five, 5), 5), UnsupportedArity);
    EXPECT_THROW(parse_scheme("laplace"), InvalidArgument);
}

TEST(DualProperties, FiberResidualSmall)
{
    for (double ratio : {1.5, 1.0, 0.7, 11.0 / 15.0, 0.55}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = derivative_family(s, s.n_generators);
        const DualEvaluator e = [&](double y) { return dual_at(f, y); };
        for (double x : make_frequency_grid(s, 256).nodes) {
            ASSERT_LT(fiber_duality_residual(f, e, x), 1e-10) << ratio << " " << x;
        }
    }
}

TEST(DualProperties, ConjugateSymmetryOfRealFamilies)
{
    // (ix)^k obeys phi(-y) = conj(phi(y)); the canonical dual inherits it.
    for (double ratio : {1.3, 0.7, 0.55}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = derivative_family(s, s.n_generators);
        for (int i = 0; i < 400; ++i) {
            const double y = 0.001 + i * 0.0024;
            ASSERT_LT((dual_at(f, -y) - dual_at(f, y).conjugate()).norm(), 1e-11);
        }
    }
}

TEST(DualProperties, SupportedOnBand)
{
    const auto bundle = builtin_scheme(Scheme::Derivative3, 1.0, 2.0 * kPi / 0.7, 256);
    for (double y : {1.0, -1.0, 1.2, -3.0}) {
        EXPECT_EQ(bundle.duals.at(y).norm(), 0.0);
    }
    EXPECT_GT(bundle.duals.at(0.999).norm(), 0.0);
    EXPECT_EQ(bundle.duals.closed_form.value(), "derivative3");
}

TEST(DualProperties, DualOfDualIsOriginalFiber)
{
    for (double ratio : {1.5, 0.7, 11.0 / 15.0, 0.55}) {
        const BandSpec s = make_band_spec_ratio(1.0, ratio);
        const GeneratorFamily f = derivative_family(s, s.n_generators);
        const DualEvaluator e = [&](double y) { return dual_at(f, y); };
        for (double x : make_frequency_grid(s, 128).nodes) {
            const SubInterval& sub = s.partition[locate(s, x)];
            const ComplexMatrix jd = dual_pre_gramian(s, e, f.size(), x);
            const ComplexMatrix back = detail::dual_fiber(jd, sub);
            ASSERT_LT((back - pre_gramian(f, x)).norm(), 1e-9 * pre_gramian(f, x).norm()) << ratio << " " << x;
        }
    }
}

TEST(DualProperties, DualFrameBoundsAreReciprocal)
{
    const BandSpec s = make_band_spec_ratio(1.0, 11.0 / 15.0);
    const GeneratorFamily f = derivative_family(s, 3);
    const DualEvaluator e = [&](double y) { return dual_at(f, y); };
    const FrequencyGrid grid = make_frequency_grid(s, 512);
    double a_star = 1e300;
    double b_star = 0.0;
    for (double x : grid.nodes) {
        const ComplexMatrix jd = dual_pre_gramian(s, e, 3, x);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(jd * jd.adjoint());
        a_star = std::min(a_star, eig.eigenvalues()(0));
        b_star = std::max(b_star, eig.eigenvalues()(eig.eigenvalues().size() - 1));
    }
    const FrameBounds fb = frame_bounds(f, grid);
    EXPECT_NEAR(a_star, 1.0 / fb.B, 1e-9 / fb.B);
    EXPECT_NEAR(b_star, 1.0 / fb.A, 1e-9 / fb.A);
}

TEST(DualMultiplier, CubicMultiplierMatchesPointwise)
{
    const BandSpec s = make_band_spec_ratio(1.0, 1.5);
    const GeneratorSpectrum m = monomial_generator("i x^3", 1.0, I, 3);
    const GeneratorFamily f = multiplier_family(s, m);
    EXPECT_EQ(check_frame(f).verdict, Verdict::Frame);
    EXPECT_LT(max_gap(multiplier_evaluator(f), [&](double y) { return dual_at(f, y); }, s), 1e-11);
}

TEST(DualMultiplier, DerivativeTwoIsMultiplierCase)
{
    const BandSpec s = make_band_spec_ratio(1.0, 1.25);
    const GeneratorFamily f = derivative_family(s, 2);
    EXPECT_LT(max_gap(multiplier_evaluator(f), scheme_evaluator(Scheme::Derivative2, s), s), 1e-13);
}
