#pragma once

// Multi-channel sampling and reconstruction: test signals, channel samples,
// the synthesis series, and classical closed-form series used as oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bandframe/dual_synthesis.hpp"
#include "bandframe/errors.hpp"
#include "bandframe/generators.hpp"
#include "bandframe/parallel.hpp"
#include "bandframe/signal_io.hpp"
#include "bandframe/types.hpp"

namespace bandframe {

namespace detail {

// s(u) = sinc^2(u/2) = 2 (1 - cos u) / u^2 and its first two derivatives.
// Below |u| = 2 the power series is used; above, the closed forms lose at most two digits.
inline constexpr double kSeriesCut = 2.0;

inline double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline double sinc2_series(double u, int deriv)
{
    double sum = 0.0;
    for (int m = 0; m < 30; ++m) {
        const int p = 2 * m - deriv;
        if (p < 0) continue;
        double c = 2.0 * ((m % 2 == 0) ? 1.0 : -1.0) / factorial(2 * m + 2);
        for (int d = 0; d < deriv; ++d) c *= (2 * m - d);
        sum += c * std::pow(u, p);
    }
    return sum;
}

inline double s0(double u)
{
    if (std::abs(u) < kSeriesCut) return sinc2_series(u, 0);
    const double half = std::sin(u / 2.0) / (u / 2.0);
    return half * half;
}

inline double s1(double u)
{
    if (std::abs(u) < kSeriesCut) return sinc2_series(u, 1);
    return 2.0 * std::sin(u) / (u * u) - 4.0 * (1.0 - std::cos(u)) / (u * u * u);
}

inline double s2(double u)
{
    if (std::abs(u) < kSeriesCut) return sinc2_series(u, 2);
    const double u2 = u * u;
    return 2.0 * std::cos(u) / u2 - 8.0 * std::sin(u) / (u2 * u) + 12.0 * (1.0 - std::cos(u)) / (u2 * u2);
}

/// 2 (u - sin u) / u^2, the Hilbert transform of s.
inline double hs(double u)
{
    if (std::abs(u) < kSeriesCut) {
        double sum = 0.0;
        for (int m = 1; m < 30; ++m) {
            sum += ((m % 2 == 1) ? 1.0 : -1.0) * std::pow(u, 2 * m - 1) / factorial(2 * m + 1);
        }
        return 2.0 * sum;
    }
    return 2.0 * (u - std::sin(u)) / (u * u);
}

} // namespace detail

/// A band-limited test signal with closed-form time values.
class TestSignal {
public:
    enum class Kind { Sinc2, Zero };

    /// f^(x) = (1 - |x|/b)_+, f(t) = (b / sqrt(2 pi)) sinc^2(b t / 2).
    static TestSignal sinc2(double omega, double band = 1.0)
    {
        if (!(band > 0.0) || band > omega * (1.0 + 1e-12)) {
            throw InvalidArgument("sinc2 signal: band must lie in (0, omega] to stay band-limited");
        }
        return TestSignal(Kind::Sinc2, "sinc2", omega, band);
    }

    static TestSignal zero(double omega) { return TestSignal(Kind::Zero, "zero", omega, omega); }

    static TestSignal by_name(const std::string& name, double omega)
    {
        if (name == "sinc2") return sinc2(omega, std::min(1.0, omega));
        if (name == "zero") return zero(omega);
        throw InvalidArgument("unknown signal '" + name + "' (expected sinc2 or zero)");
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] double band() const { return band_; }

    [[nodiscard]] Complex spectrum(double x) const
    {
        if (kind_ == Kind::Zero) return {0.0, 0.0};
        const double v = 1.0 - std::abs(x) / band_;
        return {v > 0.0 ? v : 0.0, 0.0};
    }

    [[nodiscard]] std::vector<double> breakpoints() const
    {
        if (kind_ == Kind::Zero) return {-omega_, omega_};
        std::vector<double> b{-omega_, -band_, 0.0, band_, omega_};
        std::ranges::sort(b);
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }

    [[nodiscard]] double value(double t) const { return scaled(t, 0, detail::s0); }
    [[nodiscard]] double d1(double t) const { return scaled(t, 1, detail::s1); }
    [[nodiscard]] double d2(double t) const { return scaled(t, 2, detail::s2); }
    [[nodiscard]] double hilbert(double t) const { return scaled(t, 0, detail::hs); }

    /// (1/sqrt(2 pi)) * integral of f^(x) (ix)^k e^{itx} dx by Gauss-Legendre.
    /// Independent of the closed forms above.
    [[nodiscard]] double derivative_by_quadrature(double t, int k) const
    {
        const Complex ik{0.0, 1.0};
        const Complex v = integrate_pieces(
            [&](double x) { return spectrum(x) * std::pow(ik * x, k) * std::polar(1.0, t * x); }, breakpoints(), 16);
        return v.real() / kSqrtTwoPi;
    }

    /// Same for the Hilbert multiplier -i sign(x).
    [[nodiscard]] double hilbert_by_quadrature(double t) const
    {
        const Complex v = integrate_pieces(
            [&](double x) { return spectrum(x) * Complex{0.0, -sign_of(x)} * std::polar(1.0, t * x); },
            breakpoints(), 16);
        return v.real() / kSqrtTwoPi;
    }

private:
    TestSignal(Kind k, std::string name, double omega, double band)
        : kind_(k), name_(std::move(name)), omega_(omega), band_(band)
    {
    }

    [[nodiscard]] double scaled(double t, int deriv, double (*fn)(double)) const
    {
        if (kind_ == Kind::Zero) return 0.0;
        return std::pow(band_, deriv + 1) / kSqrtTwoPi * fn(band_ * t);
    }

    Kind kind_;
    std::string name_;
    double omega_;
    double band_;
};

/// c_j(k) for k = -K..K. Reconstruction multiplies each channel by its sign.
struct ChannelSamples {
    std::string scheme;
    double t_o = 0.0;
    int K = 0;
    /// values[j][k + K].
    std::vector<std::vector<Complex>> values;
    std::vector<double> signs;

    [[nodiscard]] std::size_t channels() const { return values.size(); }
    [[nodiscard]] Complex at(std::size_t j, int k) const { return values[j][static_cast<std::size_t>(k + K)]; }
};

/// Builtin schemes sample f, f', f'' (or f and Hf) at k t_o; signs (+, -, +) resp. (+, -).
inline ChannelSamples channel_samples(const TestSignal& f, Scheme scheme, double t_o, int K)
{
    if (K < 1) throw InvalidArgument("K must be at least 1");
    scheme_family(scheme, make_band_spec(f.omega(), t_o));
    ChannelSamples s;
    s.scheme = std::string(to_string(scheme));
    s.t_o = t_o;
    s.K = K;
    const std::size_t n = static_cast<std::size_t>(2 * K + 1);
    const int arity = scheme_arity(scheme);
    s.values.assign(static_cast<std::size_t>(arity), std::vector<Complex>(n));
    for (int k = -K; k <= K; ++k) {
        const double t = k * t_o;
        const auto i = static_cast<std::size_t>(k + K);
        s.values[0][i] = f.value(t);
        if (scheme == Scheme::Hilbert) {
            s.values[1][i] = f.hilbert(t);
        } else {
            s.values[1][i] = f.d1(t);
            if (arity == 3) s.values[2][i] = f.d2(t);
        }
    }
    s.signs = arity == 3 ? std::vector<double>{1.0, -1.0, 1.0} : std::vector<double>{1.0, -1.0};
    return s;
}

/// Generic channels: g_j(k) = (1/sqrt(2 pi)) * integral of f^ conj(phi_j) e^{i k t_o x} dx, all signs +1.
inline ChannelSamples channel_samples(const TestSignal& f, const GeneratorFamily& family, int K)
{
    if (K < 1) throw InvalidArgument("K must be at least 1");
    const double t_o = family.spec().t_o;
    ChannelSamples s;
    s.scheme = family.tag();
    s.t_o = t_o;
    s.K = K;
    s.values.assign(family.size(), std::vector<Complex>(static_cast<std::size_t>(2 * K + 1)));
    s.signs.assign(family.size(), 1.0);
    std::vector<double> bps = f.breakpoints();
    for (const auto& g : family.generators()) {
        for (double b : g.breakpoints()) bps.push_back(b);
    }
    std::ranges::sort(bps);
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    for (std::size_t j = 0; j < family.size(); ++j) {
        const auto& g = family.generators()[j];
        for (int k = -K; k <= K; ++k) {
            const double a = k * t_o;
            s.values[j][static_cast<std::size_t>(k + K)] =
                integrate_pieces([&](double x) { return f.spectrum(x) * std::conj(g(x)) * std::polar(1.0, a * x); },
                                 bps, 16) /
                kSqrtTwoPi;
        }
    }
    return s;
}

// ---- time-domain duals ---------------------------------------------------------

/// Analytic time kernels, where the dual spectra have an elementary inverse transform.
inline std::optional<std::vector<std::function<Complex(double)>>> closed_form_time_duals(Scheme scheme,
                                                                                         const BandSpec& spec)
{
    const double w = spec.omega;
    const double h = spec.h;
    const double c = 1.0 / kSqrtTwoPi;
    using Fn = std::function<Complex(double)>;
    switch (scheme) {
    case Scheme::Hilbert: {
        const double amp = std::sqrt(2.0 / kPi) * w / (2.0 * h);
        return std::vector<Fn>{
            [=](double t) { return Complex{amp * std::cos(w * t / 2) * sinc(w * t / 2), 0.0}; },
            [=](double t) { return Complex{amp * std::sin(w * t / 2) * sinc(w * t / 2), 0.0}; }};
    }
    case Scheme::Derivative2:
        if (!spec.riesz_boundary()) return std::nullopt;
        return std::vector<Fn>{[=](double t) {
                                   const double s = sinc(w * t / 2);
                                   return Complex{c * s * s, 0.0};
                               },
                               [=](double t) {
                                   const double s = sinc(w * t / 2);
                                   return Complex{-c * t * s * s, 0.0};
                               }};
    case Scheme::Derivative3:
        if (!spec.riesz_boundary()) return std::nullopt;
        return std::vector<Fn>{[=](double t) {
                                   const double s = sinc(w * t / 3);
                                   return Complex{c * (1.0 + w * w * t * t / 18.0) * s * s * s, 0.0};
                               },
                               [=](double t) {
                                   const double s = sinc(w * t / 3);
                                   return Complex{-c * t * s * s * s, 0.0};
                               },
                               [=](double t) {
                                   const double s = sinc(w * t / 3);
                                   return Complex{0.5 * c * t * t * s * s * s, 0.0};
                               }};
    }
    return std::nullopt;
}

struct KernelOptions {
    double half_width = 0.0;
    double spacing = kDefaultKnotSpacing;
    std::size_t quadrature_nodes = kDefaultQuadratureNodes;
    /// Use the trapezoid route even when an analytic kernel exists.
    bool force_quadrature = false;
};

/// Time-domain duals: analytic where available, otherwise inverse transform plus spline.
inline std::vector<TimeKernel> dual_kernels(const DualFamily& duals, const KernelOptions& opt)
{
    if (!opt.force_quadrature && duals.closed_form) {
        if (auto fns = closed_form_time_duals(parse_scheme(*duals.closed_form), duals.spec)) {
            std::vector<TimeKernel> out;
            for (auto& fn : *fns) out.push_back(closed_form_kernel(std::move(fn), opt.half_width, opt.spacing));
            return out;
        }
    }
    return quadrature_kernels(sample_spectrum(duals, opt.quadrature_nodes), opt.half_width, opt.spacing);
}

// ---- reconstruction --------------------------------------------------------------

struct ReconstructionReport {
    std::vector<double> eval_grid;
    std::vector<double> reconstructed;
    std::vector<double> reference;
    double max_abs_error = 0.0;
    double rms_error = 0.0;
    int K = 0;
    double t_o = 0.0;
};

/// Uniform grid a, a + step, ..., b (b included when it lands within rounding).
inline std::vector<double> uniform_grid(double a, double b, double step)
{
    if (!(b >= a) || !(step > 0.0)) throw InvalidArgument("evaluation window needs a <= b and a positive step");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = a + static_cast<double>(i) * step;
    return g;
}

/// sqrt(2 pi) * sum_{k=-K..K} sum_j s_j c_j(k) phi*_j(x - k t_o), k outer, j inner.
inline double synthesize(const ChannelSamples& s, const std::vector<TimeKernel>& kernels, double x)
{
    if (kernels.size() != s.channels()) {
        throw DimensionMismatch("reconstruct: " + std::to_string(s.channels()) + " channels but " +
                                std::to_string(kernels.size()) + " dual kernels");
    }
    Complex sum{0.0, 0.0};
    for (int k = -s.K; k <= s.K; ++k) {
        const double t = x - k * s.t_o;
        for (std::size_t j = 0; j < kernels.size(); ++j) {
            sum += s.signs[j] * s.at(j, k) * kernels[j].eval(t);
        }
    }
    return kSqrtTwoPi * sum.real();
}

inline ReconstructionReport reconstruct(const ChannelSamples& s, const std::vector<TimeKernel>& kernels,
                                        const std::vector<double>& grid, const std::function<double(double)>& reference)
{
    if (kernels.empty()) throw InvalidArgument("reconstruct: no dual kernels supplied");
    ReconstructionReport r;
    r.eval_grid = grid;
    r.K = s.K;
    r.t_o = s.t_o;
    r.reconstructed.resize(grid.size());
    r.reference.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        r.reconstructed[i] = synthesize(s, kernels, grid[i]);
        r.reference[i] = reference(grid[i]);
    });
    double sq = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = std::abs(r.reconstructed[i] - r.reference[i]);
        r.max_abs_error = std::max(r.max_abs_error, e);
        sq += e * e;
    }
    r.rms_error = grid.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(grid.size()));
    return r;
}

inline TableArtifact error_table(const ReconstructionReport& r)
{
    TableArtifact t;
    t.kind = TableKind::ErrorTable;
    t.header = {"x", "f_ref", "f_rec", "abs_err"};
    for (std::size_t i = 0; i < r.eval_grid.size(); ++i) {
        t.rows.push_back({r.eval_grid[i], r.reference[i], r.reconstructed[i],
                          std::abs(r.reconstructed[i] - r.reference[i])});
    }
    return t;
}

struct ExperimentConfig {
    Scheme scheme = Scheme::Derivative3;
    double omega = 1.0;
    double t_o = 3.0 * kPi;
    int K = 64;
    double window_lo = -10.0;
    double window_hi = 10.0;
    double step = 0.01;
    std::size_t grid_size = kDefaultGridSize;
    std::size_t quadrature_nodes = kDefaultQuadratureNodes;
    double knot_spacing = kDefaultKnotSpacing;
};

/// Whole pipeline: builtin scheme, its duals and kernels, samples of the signal, and the error report.
inline ReconstructionReport run_experiment(const ExperimentConfig& cfg, const TestSignal& signal)
{
    const SchemeBundle bundle = builtin_scheme(cfg.scheme, cfg.omega, cfg.t_o, cfg.grid_size);
    KernelOptions ko;
    ko.half_width = std::max(std::abs(cfg.window_lo), std::abs(cfg.window_hi)) + cfg.K * cfg.t_o + 1.0;
    ko.spacing = cfg.knot_spacing;
    ko.quadrature_nodes = cfg.quadrature_nodes;
    const auto kernels = dual_kernels(bundle.duals, ko);
    const ChannelSamples s = channel_samples(signal, cfg.scheme, cfg.t_o, cfg.K);
    return reconstruct(s, kernels, uniform_grid(cfg.window_lo, cfg.window_hi, cfg.step),
                       [&signal](double x) { return signal.value(x); });
}

// ---- classical series ------------------------------------------------------------

namespace detail {

inline void require_channels(const ChannelSamples& s, std::size_t n, const char* what)
{
    if (s.channels() < n) {
        throw DimensionMismatch(std::string(what) + ": needs " + std::to_string(n) + " sample channels");
    }
}

inline void require_step(double t_o, double expected, const char* what)
{
    if (std::abs(t_o - expected) > 1e-9 * expected) {
        throw InadmissibleRegime(std::string(what) + ": expects t_o = " + std::to_string(expected) + ", got " +
                                 std::to_string(t_o));
    }
}

} // namespace detail

/// sin^3 series for sampling f, f', f'' at 3 n pi / omega:
/// f(x) = (27 / omega^3) sin^3(omega x / 3) sum_n (-1)^n [f/u^3 + f omega^2/(18 u) + f'/u^2 + f''/(2u)], u = x - x_n.
inline double linden_series(const ChannelSamples& s, double x, double omega)
{
    detail::require_channels(s, 3, "linden_series");
    detail::require_step(s.t_o, 3.0 * kPi / omega, "linden_series");
    const double pre = 27.0 / (omega * omega * omega);
    const double s3 = std::pow(std::sin(omega * x / 3.0), 3);
    double sum = 0.0;
    for (int n = -s.K; n <= s.K; ++n) {
        const double u = x - n * s.t_o;
        const double f = s.at(0, n).real();
        const double fp = s.at(1, n).real();
        const double fpp = s.at(2, n).real();
        if (std::abs(omega * u / 3.0) < 1e-3) {
            // Removable singularity: same term written with sinc^3.
            const double k = std::pow(sinc(omega * u / 3.0), 3);
            sum += k * (f * (1.0 + omega * omega * u * u / 18.0) + fp * u + fpp * u * u / 2.0);
            continue;
        }
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        sum += pre * s3 * sgn *
               (f / (u * u * u) + f * omega * omega / (18.0 * u) + fp / (u * u) + fpp / (2.0 * u));
    }
    return sum;
}

/// Two-channel value/derivative series at t_o = 2 pi / omega:
/// f(x) = sum_k [f(k t_o) sinc^2(a) + (2/omega) f'(k t_o) sin(a) sinc(a)], a = omega (x - k t_o) / 2.
inline double jagerman_fogel(const ChannelSamples& s, double x, double omega)
{
    detail::require_channels(s, 2, "jagerman_fogel");
    detail::require_step(s.t_o, kTwoPi / omega, "jagerman_fogel");
    double sum = 0.0;
    for (int k = -s.K; k <= s.K; ++k) {
        const double a = omega * (x - k * s.t_o) / 2.0;
        const double sa = sinc(a);
        sum += s.at(0, k).real() * sa * sa + (2.0 / omega) * s.at(1, k).real() * std::sin(a) * sa;
    }
    return sum;
}

/// (omega / h) sum_k [f(k t_o) cos(a) sinc(a) - Hf(k t_o) sin(a) sinc(a)], a = omega (x - k t_o) / 2.
inline double hilbert_reconstruct_formula(const ChannelSamples& s, double x, double omega, double h)
{
    detail::require_channels(s, 2, "hilbert_reconstruct_formula");
    if (!(h >= omega * (1.0 - 1e-12) && h < 2.0 * omega)) {
        throw InadmissibleRegime("hilbert_reconstruct_formula needs omega <= h < 2 omega");
    }
    double sum = 0.0;
    for (int k = -s.K; k <= s.K; ++k) {
        const double a = omega * (x - k * s.t_o) / 2.0;
        const double sa = sinc(a);
        sum += s.at(0, k).real() * std::cos(a) * sa - s.at(1, k).real() * std::sin(a) * sa;
    }
    return omega / h * sum;
}

} // namespace bandframe
