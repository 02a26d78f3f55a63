#pragma once

// Canonical dual generators. Three independent routes:
//   pointwise      solve the fiber equation J = J J* J_dual node by node
//   cross product  piecewise closed forms for N = 2, 3, 4
//   riesz          conj(G^{-1}) applied to the generator vector (Riesz bases only)
// plus hand-derived formulas for the builtin sampling schemes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "bandframe/errors.hpp"
#include "bandframe/frame_analysis.hpp"
#include "bandframe/generators.hpp"
#include "bandframe/matrix_kernels.hpp"
#include "bandframe/parallel.hpp"
#include "bandframe/spectral_core.hpp"

namespace bandframe {

/// y -> (phi*_1(y), ..., phi*_N(y)); zero outside the band.
using DualEvaluator = std::function<ComplexVector(double)>;

struct DualFamily {
    BandSpec spec;
    FrequencyGrid grid;
    /// Band frequencies at which the samples were taken, ascending.
    std::vector<BandNode> nodes;
    /// spectra[i][n] = phi*_i at nodes[n].
    std::vector<std::vector<Complex>> spectra;
    DualEvaluator evaluator;
    /// Points of [-omega, omega] where a dual may be non-smooth (including +-omega).
    std::vector<double> breakpoints;
    /// Which route produced the samples: pointwise, cross-product, riesz, or scheme:<tag>.
    std::string source;
    /// Scheme tag when an analytic description is attached.
    std::optional<std::string> closed_form;

    [[nodiscard]] std::size_t arity() const { return spectra.size(); }

    [[nodiscard]] ComplexVector at(double y) const
    {
        if (!(std::abs(y) < spec.omega)) {
            return ComplexVector::Zero(static_cast<Eigen::Index>(arity()));
        }
        return evaluator(y);
    }
};

namespace detail {

inline std::size_t shift_row(const SubInterval& sub, int shift)
{
    const auto it = std::ranges::find(sub.active_shifts, shift);
    if (it == sub.active_shifts.end()) {
        throw SingularFiber("band frequency maps to shift " + std::to_string(shift) +
                            ", which is not active in " + std::string(to_string(sub.label)));
    }
    return static_cast<std::size_t>(it - sub.active_shifts.begin());
}

/// Solves J = J J* X: X = (J*)^{-1} on square fibers, (J*)^+ on reduced ones.
inline ComplexMatrix dual_fiber(const ComplexMatrix& j, const SubInterval& sub)
{
    const ComplexMatrix adj = j.adjoint();
    if (sub.full_rank_expected) {
        if (j.rows() != j.cols()) {
            throw SingularFiber("expected a square fiber on " + std::string(to_string(sub.label)));
        }
        try {
            return cofactor_inverse(adj);
        } catch (const SingularMatrix&) {
            throw SingularFiber("singular fiber on " + std::string(to_string(sub.label)));
        }
    }
    if (j.rows() + 1 != j.cols()) {
        throw SingularFiber("expected an (N-1) x N fiber on " + std::string(to_string(sub.label)));
    }
    try {
        return mp_inverse_tall(adj);
    } catch (const RankDeficient&) {
        throw SingularFiber("rank-deficient reduced fiber on " + std::string(to_string(sub.label)));
    }
}

inline DualFamily sample_duals(const GeneratorFamily& family, const FrequencyGrid& grid, DualEvaluator eval,
                               std::string source)
{
    DualFamily d;
    d.spec = family.spec();
    d.grid = grid;
    d.nodes = band_nodes(grid);
    d.breakpoints = family.band_breakpoints();
    d.source = std::move(source);
    const std::size_t n_gen = family.size();
    d.spectra.assign(n_gen, std::vector<Complex>(d.nodes.size()));
    parallel_for(d.nodes.size(), [&](std::size_t n) {
        const ComplexVector v = eval(d.nodes[n].y);
        for (std::size_t i = 0; i < n_gen; ++i) d.spectra[i][n] = v(static_cast<Eigen::Index>(i));
    });
    d.evaluator = std::move(eval);
    return d;
}

inline void require_frame(const GeneratorFamily& family, const FrequencyGrid& grid)
{
    if (check_frame(family, grid).verdict == Verdict::NotFrame) {
        throw NotFrame("family '" + family.tag() + "' is not a frame; the canonical dual does not exist");
    }
}

} // namespace detail

/// Dual spectra at one band frequency by solving the fiber equation.
inline ComplexVector dual_at(const GeneratorFamily& family, double y)
{
    const BandSpec& spec = family.spec();
    const auto n = static_cast<Eigen::Index>(family.size());
    if (!(std::abs(y) < spec.omega)) return ComplexVector::Zero(n);
    const FiberCoordinate fc = to_fiber(spec, y);
    const SubInterval& sub = spec.partition[locate_from_right(spec, fc.x)];
    const ComplexMatrix dual = detail::dual_fiber(pre_gramian(family, fc.x, sub), sub);
    return dual.row(static_cast<Eigen::Index>(detail::shift_row(sub, fc.shift))).transpose() / std::sqrt(spec.h);
}

/// The matrix J_dual(x) with entries sqrt(h) phi*_i(x + j h), built from a dual evaluator.
inline ComplexMatrix dual_pre_gramian(const BandSpec& spec, const DualEvaluator& dual, std::size_t n, double x)
{
    const SubInterval& sub = spec.partition[locate(spec, x)];
    const double root_h = std::sqrt(spec.h);
    ComplexMatrix m(static_cast<Eigen::Index>(sub.active_shifts.size()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < sub.active_shifts.size(); ++r) {
        m.row(static_cast<Eigen::Index>(r)) = root_h * dual(x + sub.active_shifts[r] * spec.h).transpose();
    }
    return m;
}

/// Frobenius norm of J - J J* J_dual at fiber abscissa x.
inline double fiber_duality_residual(const GeneratorFamily& family, const DualEvaluator& dual, double x)
{
    const ComplexMatrix j = pre_gramian(family, x);
    const ComplexMatrix jd = dual_pre_gramian(family.spec(), dual, family.size(), x);
    return (j - j * j.adjoint() * jd).norm();
}

inline DualFamily duals_pointwise(const GeneratorFamily& family, const FrequencyGrid& grid)
{
    detail::require_frame(family, grid);
    return detail::sample_duals(
        family, grid, [family](double y) { return dual_at(family, y); }, "pointwise");
}

/// phi* = conj(G^{-1}) phi, with G = J* J inverted by LU.
inline DualFamily duals_riesz(const GeneratorFamily& family, const FrequencyGrid& grid)
{
    const FrameReport report = check_frame(family, grid);
    if (report.verdict != Verdict::RieszBasis) {
        throw NotRiesz("family '" + family.tag() + "' is " + std::string(to_string(report.verdict)) +
                       ", not a Riesz basis");
    }
    auto eval = [family](double y) -> ComplexVector {
        const BandSpec& spec = family.spec();
        if (!(std::abs(y) < spec.omega)) return ComplexVector::Zero(static_cast<Eigen::Index>(family.size()));
        const ComplexMatrix j = pre_gramian_right(family, to_fiber(spec, y).x);
        const ComplexMatrix g = j.adjoint() * j;
        const ComplexMatrix g_inv = g.partialPivLu().inverse();
        return g_inv.conjugate() * family.values(y);
    };
    return detail::sample_duals(family, grid, eval, "riesz");
}

namespace detail {

inline ComplexVector cross_of(std::initializer_list<ComplexVector> v)
{
    return cross_product(v);
}

/// N = 2, omega <= h < 2 omega.
inline ComplexVector cross_dual_2(const GeneratorFamily& f, double y)
{
    const BandSpec& s = f.spec();
    const double w = s.omega;
    const double h = s.h;
    auto phi = [&](int k) { return ComplexVector(f.values(y + k * h)); };
    auto cphi = [&](int k) { return ComplexVector(f.values(y + k * h).conjugate()); };
    const ComplexMatrix j = pre_gramian_right(f, to_fiber(s, y).x);
    if (y < w - h) {
        const Complex d = 1.0 / determinant(j.adjoint());
        return d * cross_of({cphi(1)});
    }
    if (y < h - w) {
        const ComplexVector v = phi(0);
        return v / (h * v.squaredNorm());
    }
    const Complex d = 1.0 / determinant(j.adjoint());
    return -d * cross_of({cphi(-1)});
}

/// N = 3, 2 omega / 3 <= h < omega.
inline ComplexVector cross_dual_3(const GeneratorFamily& f, double y)
{
    const BandSpec& s = f.spec();
    const double w = s.omega;
    const double h = s.h;
    auto phi = [&](int k) { return ComplexVector(f.values(y + k * h)); };
    auto cphi = [&](int k) { return ComplexVector(f.values(y + k * h).conjugate()); };
    const ComplexMatrix j = pre_gramian_right(f, to_fiber(s, y).x);
    auto d = [&] { return std::sqrt(h) / determinant(j.adjoint()); };
    auto d1 = [&] { return h / determinant(j * j.adjoint()); };
    if (y < w - 2 * h) return d() * cross_of({cphi(1), cphi(2)});
    if (y < h - w) return d1() * cross_of({cross_of({phi(1), phi(0)}), cphi(1)});
    if (y < w - h) return d() * cross_of({cphi(1), cphi(-1)});
    if (y < 2 * h - w) return -d1() * cross_of({cphi(-1), cross_of({phi(-1), phi(0)})});
    return d() * cross_of({cphi(-2), cphi(-1)});
}

/// N = 4, omega / 2 <= h < 2 omega / 3. Formulas are written for y > 0; for y < 0 every
/// shift tau_{kh} becomes tau_{-kh}, inside W as well, with the same signs.
inline ComplexVector cross_dual_4(const GeneratorFamily& f, double y)
{
    const BandSpec& s = f.spec();
    const double w = s.omega;
    const double h = s.h;
    const double dir = y > 0.0 ? 1.0 : -1.0;
    const double a = std::abs(y);
    auto phi = [&](int k) { return ComplexVector(f.values(y + dir * k * h)); };
    auto cphi = [&](int k) { return ComplexVector(f.values(y + dir * k * h).conjugate()); };
    const ComplexMatrix j = pre_gramian_right(f, to_fiber(s, y).x);
    auto d = [&] { return h / determinant(j.conjugate()); };
    auto d1 = [&] { return h * h / determinant(j * j.adjoint()); };
    if (a < 2 * h - w) {
        const ComplexVector wv = cross_of({phi(-1), phi(0), phi(1)});
        return -d1() * cross_of({cphi(-1), wv, cphi(1)});
    }
    if (a < w - h) return d() * cross_of({cphi(-2), cphi(-1), cphi(1)});
    if (a < 3 * h - w) {
        const ComplexVector wv = cross_of({phi(-2), phi(-1), phi(0)});
        return -d1() * cross_of({cphi(-2), cphi(-1), wv});
    }
    return -d() * cross_of({cphi(-3), cphi(-2), cphi(-1)});
}

inline void require_regime(const BandSpec& s, int n, const char* what)
{
    const int ell = (n == 2) ? 1 : 2;
    if (s.n_generators != n || s.ell != ell) {
        throw InadmissibleRegime(std::string(what) + ": h = " + std::to_string(s.h) + " gives N = " +
                                 std::to_string(s.n_generators) + ", the formulas need N = " + std::to_string(n));
    }
}

} // namespace detail

/// Cross-product closed forms for N = 2, 3, 4. D and D1 come from the actual fiber determinants.
inline DualEvaluator cross_product_evaluator(const GeneratorFamily& family, int arity)
{
    if (static_cast<int>(family.size()) != arity) {
        throw DimensionMismatch("closed-form duals: family has " + std::to_string(family.size()) +
                                " generators, arity " + std::to_string(arity) + " requested");
    }
    const BandSpec& s = family.spec();
    ComplexVector (*fn)(const GeneratorFamily&, double) = nullptr;
    switch (arity) {
    case 2: fn = &detail::cross_dual_2; break;
    case 3: fn = &detail::cross_dual_3; break;
    case 4: fn = &detail::cross_dual_4; break;
    default: throw UnsupportedArity("closed-form duals exist for N = 2, 3, 4 only");
    }
    detail::require_regime(s, arity, "closed-form duals");
    return [family, fn](double y) -> ComplexVector {
        if (!(std::abs(y) < family.spec().omega)) return ComplexVector::Zero(static_cast<Eigen::Index>(family.size()));
        return fn(family, y);
    };
}

inline DualFamily duals_closed_form(const GeneratorFamily& family, const FrequencyGrid& grid, int arity)
{
    DualEvaluator eval = cross_product_evaluator(family, arity);
    detail::require_frame(family, grid);
    return detail::sample_duals(family, grid, std::move(eval), "cross-product");
}

// ---- builtin schemes -------------------------------------------------------

enum class Scheme { Hilbert, Derivative2, Derivative3 };

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::Hilbert: return "hilbert";
    case Scheme::Derivative2: return "derivative2";
    case Scheme::Derivative3: return "derivative3";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view tag)
{
    if (tag == "hilbert") return Scheme::Hilbert;
    if (tag == "derivative2") return Scheme::Derivative2;
    if (tag == "derivative3") return Scheme::Derivative3;
    throw InvalidArgument("unknown scheme '" + std::string(tag) + "' (expected hilbert, derivative2, derivative3)");
}

inline int scheme_arity(Scheme s)
{
    return s == Scheme::Derivative3 ? 3 : 2;
}

inline GeneratorFamily scheme_family(Scheme s, const BandSpec& spec)
{
    const int n = scheme_arity(s);
    if (spec.n_generators != n) {
        throw InadmissibleRegime(std::string(to_string(s)) + " needs " +
                                 (n == 2 ? "omega <= h < 2 omega" : "2 omega / 3 <= h < omega") +
                                 "; got h / omega = " + std::to_string(spec.h / spec.omega));
    }
    return s == Scheme::Hilbert ? hilbert_family(spec) : derivative_family(spec, n);
}

namespace detail {

/// Three-channel frame-only branch on (omega - 2h, h - omega), written for shift step hs.
inline ComplexVector d3_rational(double hs, double x)
{
    const double xh = x + hs;
    const double den = 1.0 + (2 * x + hs) * (2 * x + hs) + x * x * xh * xh;
    const double s = 1.0 / (den * hs * hs);
    ComplexVector v(3);
    v << Complex{(xh + (2 * x + hs) * xh * xh) * s, 0.0}, Complex{0.0, -(1.0 - x * xh * xh * xh) * s},
        Complex{(hs + 2 * x + x * xh * xh) * s, 0.0};
    return v;
}

} // namespace detail

/// Scheme formulas derived by hand for the builtin families (omega = 1 units are not assumed).
inline DualEvaluator scheme_evaluator(Scheme scheme, const BandSpec& spec)
{
    const double w = spec.omega;
    const double h = spec.h;
    switch (scheme) {
    case Scheme::Hilbert: {
        const GeneratorFamily fam = hilbert_family(spec);
        return [fam, h](double y) -> ComplexVector { return fam.values(y) / (2.0 * h); };
    }
    case Scheme::Derivative2:
        scheme_family(scheme, spec);
        return [w, h](double y) -> ComplexVector {
            ComplexVector v = ComplexVector::Zero(2);
            const double a = std::abs(y);
            if (!(a < w)) return v;
            if (a < h - w) {
                const double den = h * (1.0 + y * y);
                v << 1.0 / den, Complex{0.0, y / den};
            } else {
                v << (1.0 - a / h) / h, Complex{0.0, sign_of(y) / (h * h)};
            }
            return v;
        };
    case Scheme::Derivative3:
        scheme_family(scheme, spec);
        return [w, h](double y) -> ComplexVector {
            ComplexVector v = ComplexVector::Zero(3);
            if (!(std::abs(y) < w)) return v;
            const double h3 = h * h * h;
            if (y < w - 2 * h) {
                v << (y * y + 3 * h * y + 2 * h * h) / (2 * h3), Complex{0.0, -(2 * y + 3 * h) / (2 * h3)},
                    -1.0 / (2 * h3);
            } else if (y < h - w) {
                v = detail::d3_rational(h, y);
            } else if (y < w - h) {
                v << (h * h - y * y) / h3, Complex{0.0, 2 * y / h3}, 1.0 / h3;
            } else if (y < 2 * h - w) {
                v = -detail::d3_rational(-h, y);
            } else {
                v << (y * y - 3 * h * y + 2 * h * h) / (2 * h3), Complex{0.0, -(2 * y - 3 * h) / (2 * h3)},
                    -1.0 / (2 * h3);
            }
            return v;
        };
    }
    throw InvalidArgument("unknown scheme");
}

/// Two-channel family (1, m): duals from the difference m - tau_{-h} m.
inline DualEvaluator multiplier_evaluator(const GeneratorFamily& family)
{
    if (family.size() != 2) {
        throw DimensionMismatch("multiplier duals need a two-generator family (1, m)");
    }
    const BandSpec& s = family.spec();
    const double w = s.omega;
    const double h = s.h;
    const GeneratorSpectrum m = family.generators()[1];
    return [m, w, h](double y) -> ComplexVector {
        ComplexVector v = ComplexVector::Zero(2);
        if (!(std::abs(y) < w)) return v;
        auto cm = [&](double t) { return std::conj(m(t)); };
        if (y < w - h) {
            const Complex diff = h * (cm(y + h) - cm(y));
            v << cm(y + h) / diff, -1.0 / diff;
        } else if (y < h - w) {
            const double den = h * (1.0 + std::norm(m(y)));
            v << 1.0 / den, m(y) / den;
        } else {
            const Complex diff = h * (cm(y) - cm(y - h));
            v << -cm(y - h) / diff, 1.0 / diff;
        }
        return v;
    };
}

struct SchemeBundle {
    GeneratorFamily family;
    DualFamily duals;
};

inline SchemeBundle builtin_scheme(Scheme scheme, double omega, double t_o,
                                   std::size_t grid_size = kDefaultGridSize)
{
    const BandSpec spec = make_band_spec(omega, t_o);
    GeneratorFamily fam = scheme_family(scheme, spec);
    const FrequencyGrid grid = make_frequency_grid(spec, grid_size);
    DualFamily d = detail::sample_duals(fam, grid, scheme_evaluator(scheme, spec),
                                        "scheme:" + std::string(to_string(scheme)));
    d.closed_form = std::string(to_string(scheme));
    return {std::move(fam), std::move(d)};
}

inline SchemeBundle builtin_scheme(std::string_view tag, double omega, double t_o,
                                   std::size_t grid_size = kDefaultGridSize)
{
    return builtin_scheme(parse_scheme(tag), omega, t_o, grid_size);
}

/// Largest nodewise difference between two dual families sampled on the same grid.
inline double max_discrepancy(const DualFamily& a, const DualFamily& b)
{
    if (a.arity() != b.arity() || a.nodes.size() != b.nodes.size()) {
        throw DimensionMismatch("max_discrepancy: dual families are not sampled alike");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.arity(); ++i) {
        for (std::size_t n = 0; n < a.nodes.size(); ++n) {
            m = std::max(m, std::abs(a.spectra[i][n] - b.spectra[i][n]));
        }
    }
    return m;
}

} // namespace bandframe
