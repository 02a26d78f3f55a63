#pragma once

// Time-domain side: inverse Fourier transform of piecewise smooth spectra,
// natural cubic splines for kernel evaluation, band quadrature, and the CSV /
// JSON artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/FFT>
#include <json.hpp>

#include "bandframe/dual_synthesis.hpp"
#include "bandframe/errors.hpp"
#include "bandframe/frame_analysis.hpp"
#include "bandframe/types.hpp"

namespace bandframe {

// ---- spectrum sampling and inverse transform ------------------------------

inline constexpr std::size_t kDefaultQuadratureNodes = 8192;
inline constexpr std::size_t kMinQuadratureNodes = 1024;

/// One smooth piece [lo, hi] sampled at count + 1 equispaced nodes; end values are one-sided limits.
struct SpectrumPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    /// values[channel][m], m = 0..count.
    std::vector<std::vector<Complex>> values;
};

struct SampledSpectrum {
    double omega = 0.0;
    std::size_t channels = 0;
    std::vector<SpectrumPiece> pieces;
};

/// Vector-valued spectrum sampled piece by piece between consecutive breakpoints.
/// M is the total number of trapezoid intervals, allocated in proportion to piece length.
inline SampledSpectrum sample_spectrum(const std::function<ComplexVector(double)>& eval, std::size_t channels,
                                       std::vector<double> breakpoints, double omega,
                                       std::size_t m = kDefaultQuadratureNodes)
{
    if (m < kMinQuadratureNodes) {
        throw InvalidArgument("inverse transform needs at least " + std::to_string(kMinQuadratureNodes) +
                              " nodes, got " + std::to_string(m));
    }
    breakpoints.push_back(-omega);
    breakpoints.push_back(omega);
    std::ranges::sort(breakpoints);
    std::vector<double> cuts;
    for (double b : breakpoints) {
        if (b < -omega || b > omega) continue;
        if (cuts.empty() || b - cuts.back() > 1e-12 * omega) cuts.push_back(b);
    }
    SampledSpectrum s;
    s.omega = omega;
    s.channels = channels;
    const double nudge = 1e-9 * omega;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        SpectrumPiece piece;
        piece.lo = cuts[p];
        piece.hi = cuts[p + 1];
        const double len = piece.hi - piece.lo;
        piece.count = std::max<std::size_t>(16, static_cast<std::size_t>(std::llround(m * len / (2.0 * omega))));
        piece.values.assign(channels, std::vector<Complex>(piece.count + 1));
        const double step = len / static_cast<double>(piece.count);
        for (std::size_t k = 0; k <= piece.count; ++k) {
            double y = piece.lo + static_cast<double>(k) * step;
            if (k == 0) y = piece.lo + nudge;
            if (k == piece.count) y = piece.hi - nudge;
            const ComplexVector v = eval(y);
            for (std::size_t c = 0; c < channels; ++c) piece.values[c][k] = v(static_cast<Eigen::Index>(c));
        }
        s.pieces.push_back(std::move(piece));
    }
    return s;
}

inline SampledSpectrum sample_spectrum(const DualFamily& duals, std::size_t m = kDefaultQuadratureNodes)
{
    return sample_spectrum([&duals](double y) { return duals.at(y); }, duals.arity(), duals.breakpoints,
                           duals.spec.omega, m);
}

/// (1 / sqrt(2 pi)) * integral of phi(x) e^{itx} dx, composite trapezoid on every piece.
/// Returns one value per channel.
inline std::vector<Complex> inverse_ft(const SampledSpectrum& s, double t)
{
    std::vector<Complex> acc(s.channels, Complex{0.0, 0.0});
    std::vector<Complex> piece_sum(s.channels);
    for (const auto& p : s.pieces) {
        const double step = (p.hi - p.lo) / static_cast<double>(p.count);
        const Complex rot = std::polar(1.0, t * step);
        std::ranges::fill(piece_sum, Complex{0.0, 0.0});
        Complex e{0.0, 0.0};
        for (std::size_t k = 0; k <= p.count; ++k) {
            // Re-anchor the rotation every 64 steps to keep the recurrence from drifting.
            if (k % 64 == 0) {
                e = std::polar(1.0, t * (p.lo + static_cast<double>(k) * step));
            } else {
                e *= rot;
            }
            const double wgt = (k == 0 || k == p.count) ? 0.5 : 1.0;
            for (std::size_t c = 0; c < s.channels; ++c) piece_sum[c] += wgt * p.values[c][k] * e;
        }
        for (std::size_t c = 0; c < s.channels; ++c) acc[c] += step * piece_sum[c];
    }
    for (auto& a : acc) a /= kSqrtTwoPi;
    return acc;
}

namespace detail {

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// exp(i * theta * m^2 / 2) with m^2 formed exactly in integers.
inline Complex chirp(double theta, long long m)
{
    return std::polar(1.0, 0.5 * theta * static_cast<double>(m * m));
}

} // namespace detail

/// inverse_ft at t_i = t0 + i dt for i < n, all channels. Identical trapezoid sums, but each
/// piece is done as a chirp-z transform (FFT convolution) instead of n separate sums.
/// Result: out[c][i].
inline std::vector<std::vector<Complex>> inverse_ft_grid(const SampledSpectrum& s, double t0, double dt,
                                                         std::size_t n)
{
    std::vector<std::vector<Complex>> out(s.channels, std::vector<Complex>(n, Complex{0.0, 0.0}));
    if (n == 0) return out;
    Eigen::FFT<double> fft;
    for (const auto& p : s.pieces) {
        const std::size_t kn = p.count + 1;
        const double step = (p.hi - p.lo) / static_cast<double>(p.count);
        const double theta = dt * step;
        const std::size_t len = detail::next_pow2(n + kn);
        // Filter c_m = exp(-i theta m^2 / 2), m = -(kn - 1) .. n - 1, wrapped cyclically.
        std::vector<Complex> filt(len, Complex{0.0, 0.0});
        for (std::size_t m = 0; m < n; ++m) filt[m] = std::conj(detail::chirp(theta, static_cast<long long>(m)));
        for (std::size_t m = 1; m < kn; ++m) {
            filt[len - m] = std::conj(detail::chirp(theta, static_cast<long long>(m)));
        }
        std::vector<Complex> filt_hat;
        fft.fwd(filt_hat, filt);
        std::vector<Complex> pre(kn);
        for (std::size_t k = 0; k < kn; ++k) {
            const double wgt = (k == 0 || k == p.count) ? 0.5 : 1.0;
            pre[k] = wgt * std::polar(1.0, t0 * static_cast<double>(k) * step) *
                     detail::chirp(theta, static_cast<long long>(k));
        }
        std::vector<Complex> post(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = t0 + static_cast<double>(i) * dt;
            post[i] = step * std::polar(1.0, t * p.lo) * detail::chirp(theta, static_cast<long long>(i));
        }
        std::vector<Complex> b(len);
        std::vector<Complex> b_hat;
        std::vector<Complex> conv;
        for (std::size_t c = 0; c < s.channels; ++c) {
            std::ranges::fill(b, Complex{0.0, 0.0});
            for (std::size_t k = 0; k < kn; ++k) b[k] = pre[k] * p.values[c][k];
            fft.fwd(b_hat, b);
            for (std::size_t i = 0; i < len; ++i) b_hat[i] *= filt_hat[i];
            fft.inv(conv, b_hat);
            for (std::size_t i = 0; i < n; ++i) out[c][i] += post[i] * conv[i];
        }
    }
    for (auto& ch : out) {
        for (auto& v : ch) v /= kSqrtTwoPi;
    }
    return out;
}

/// Same transform for a single uniform grid on [-omega, omega] (m intervals). Every breakpoint
/// must coincide with a grid node; values at a breakpoint node should be the average of the one-sided limits.
inline Complex inverse_ft_uniform(const std::vector<Complex>& values, double omega,
                                  const std::vector<double>& breakpoints, double t)
{
    if (values.size() < kMinQuadratureNodes + 1) {
        throw InvalidArgument("inverse transform needs at least " + std::to_string(kMinQuadratureNodes) +
                              " intervals");
    }
    const std::size_t m = values.size() - 1;
    const double step = 2.0 * omega / static_cast<double>(m);
    for (double b : breakpoints) {
        if (b <= -omega || b >= omega) continue;
        const double k = (b + omega) / step;
        if (std::abs(k - std::round(k)) > 1e-9) {
            throw NotBreakpointAligned("breakpoint " + std::to_string(b) + " falls between grid nodes");
        }
    }
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k <= m; ++k) {
        const double wgt = (k == 0 || k == m) ? 0.5 : 1.0;
        sum += wgt * values[k] * std::polar(1.0, t * (-omega + static_cast<double>(k) * step));
    }
    return step * sum / kSqrtTwoPi;
}

// ---- splines and time kernels ---------------------------------------------

/// Natural cubic spline on uniform knots t0, t0 + dt, ...
class NaturalCubicSpline {
public:
    NaturalCubicSpline() = default;

    NaturalCubicSpline(double t0, double dt, std::vector<double> y) : t0_(t0), dt_(dt), y_(std::move(y))
    {
        const std::size_t n = y_.size();
        if (n < 3 || !(dt_ > 0.0)) {
            throw InvalidArgument("spline needs at least three knots and a positive spacing");
        }
        // Second derivatives: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / dt^2, m[0] = m[n-1] = 0.
        m_.assign(n, 0.0);
        std::vector<double> c(n, 0.0);
        std::vector<double> d(n, 0.0);
        const double scale = 6.0 / (dt_ * dt_);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double rhs = scale * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]);
            const double denom = 4.0 - (i > 1 ? c[i - 1] : 0.0);
            c[i] = 1.0 / denom;
            d[i] = (rhs - (i > 1 ? d[i - 1] : 0.0)) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
            if (i == 1) break;
        }
    }

    [[nodiscard]] double t_min() const { return t0_; }
    [[nodiscard]] double t_max() const { return t0_ + dt_ * static_cast<double>(y_.size() - 1); }
    [[nodiscard]] bool empty() const { return y_.empty(); }

    [[nodiscard]] double operator()(double t) const
    {
        const double slack = 1e-9 * dt_;
        if (y_.empty() || t < t_min() - slack || t > t_max() + slack) {
            throw OutOfRange("spline evaluated at t = " + std::to_string(t) + " outside [" +
                             std::to_string(t_min()) + ", " + std::to_string(t_max()) + "]");
        }
        const double pos = (t - t0_) / dt_;
        auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(y_.size() - 2)));
        const double u = pos - static_cast<double>(i);
        const double v = 1.0 - u;
        return v * y_[i] + u * y_[i + 1] +
               dt_ * dt_ / 6.0 * ((v * v * v - v) * m_[i] + (u * u * u - u) * m_[i + 1]);
    }

private:
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;
};

enum class KernelSource { ClosedForm, Quadrature };

/// A time-domain dual phi*_j(t) on [-T, T]: knot samples, their spline, and the closed form if known.
struct TimeKernel {
    KernelSource source = KernelSource::Quadrature;
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Complex> values;
    NaturalCubicSpline re;
    NaturalCubicSpline im;
    std::function<Complex(double)> closed_form;

    [[nodiscard]] double half_width() const { return -t0; }

    [[nodiscard]] Complex spline_eval(double t) const { return {re(t), im(t)}; }

    /// Closed form when available, otherwise the spline.
    [[nodiscard]] Complex eval(double t) const
    {
        if (closed_form) {
            if (std::abs(t) > half_width() * (1.0 + 1e-12)) {
                throw OutOfRange("kernel evaluated at t = " + std::to_string(t) + " beyond its window");
            }
            return closed_form(t);
        }
        return spline_eval(t);
    }

    [[nodiscard]] double max_imag() const
    {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
        return m;
    }
};

namespace detail {

inline std::size_t knot_count(double half_width, double spacing)
{
    if (!(half_width > 0.0) || !(spacing > 0.0)) {
        throw InvalidArgument("kernel window and knot spacing must be positive");
    }
    return static_cast<std::size_t>(std::ceil(2.0 * half_width / spacing)) + 1;
}

inline void fit_splines(TimeKernel& k)
{
    std::vector<double> re(k.values.size());
    std::vector<double> im(k.values.size());
    for (std::size_t i = 0; i < k.values.size(); ++i) {
        re[i] = k.values[i].real();
        im[i] = k.values[i].imag();
    }
    k.re = NaturalCubicSpline(k.t0, k.dt, std::move(re));
    k.im = NaturalCubicSpline(k.t0, k.dt, std::move(im));
}

} // namespace detail

inline constexpr double kDefaultKnotSpacing = 0.01;

/// Kernel from an analytic formula, with a spline fitted to its knot samples.
inline TimeKernel closed_form_kernel(std::function<Complex(double)> fn, double half_width,
                                     double spacing = kDefaultKnotSpacing)
{
    const std::size_t n = detail::knot_count(half_width, spacing);
    TimeKernel k;
    k.source = KernelSource::ClosedForm;
    k.dt = 2.0 * half_width / static_cast<double>(n - 1);
    k.t0 = -half_width;
    k.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) k.values[i] = fn(k.t0 + static_cast<double>(i) * k.dt);
    k.closed_form = std::move(fn);
    detail::fit_splines(k);
    return k;
}

/// Kernels of every channel of a sampled spectrum: trapezoid inverse transform at every knot.
inline std::vector<TimeKernel> quadrature_kernels(const SampledSpectrum& s, double half_width,
                                                  double spacing = kDefaultKnotSpacing)
{
    const std::size_t n = detail::knot_count(half_width, spacing);
    const double dt = 2.0 * half_width / static_cast<double>(n - 1);
    std::vector<TimeKernel> out(s.channels);
    for (auto& k : out) {
        k.source = KernelSource::Quadrature;
        k.t0 = -half_width;
        k.dt = dt;
        k.values.resize(n);
    }
    auto vals = inverse_ft_grid(s, -half_width, dt, n);
    for (std::size_t c = 0; c < s.channels; ++c) out[c].values = std::move(vals[c]);
    for (auto& k : out) detail::fit_splines(k);
    return out;
}

// ---- band quadrature ---------------------------------------------------------

/// Composite 20-point Gauss-Legendre on every gap between sorted breakpoints,
/// each gap split into `splits` equal panels.
template <class F>
Complex integrate_pieces(F&& f, std::vector<double> breakpoints, std::size_t splits = 8)
{
    std::ranges::sort(breakpoints);
    Complex total{0.0, 0.0};
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        if (!(b > a)) continue;
        const double w = (b - a) / static_cast<double>(splits);
        for (std::size_t s = 0; s < splits; ++s) {
            const double lo = a + static_cast<double>(s) * w;
            total += boost::math::quadrature::gauss<double, 20>::integrate(
                [&](double x) -> Complex { return f(x); }, lo, lo + w);
        }
    }
    return total;
}

// ---- tables ------------------------------------------------------------------

enum class TableKind { SpectrumTable, KernelTable, ErrorTable, FrameReportJSON };

struct TableArtifact {
    TableKind kind = TableKind::SpectrumTable;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    /// Only for FrameReportJSON.
    nlohmann::ordered_json report;
};

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_csv(const TableArtifact& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out += ',';
        out += t.header[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) {
            throw DimensionMismatch("table row has " + std::to_string(row.size()) + " cells, header has " +
                                    std::to_string(t.header.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline void emit_table(const TableArtifact& t, const std::string& path)
{
    const std::string text = t.kind == TableKind::FrameReportJSON ? t.report.dump(2) + "\n" : to_csv(t);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("write to '" + path + "' failed");
}

/// Columns x, re_phi1, im_phi1, ... from any vector-valued spectrum.
inline TableArtifact spectrum_table(const std::function<ComplexVector(double)>& eval, std::size_t channels,
                                    const std::vector<double>& xs, const std::string& prefix = "phi")
{
    TableArtifact t;
    t.kind = TableKind::SpectrumTable;
    t.header.push_back("x");
    for (std::size_t c = 1; c <= channels; ++c) {
        t.header.push_back("re_" + prefix + std::to_string(c));
        t.header.push_back("im_" + prefix + std::to_string(c));
    }
    for (double x : xs) {
        const ComplexVector v = eval(x);
        std::vector<double> row{x};
        for (std::size_t c = 0; c < channels; ++c) {
            row.push_back(v(static_cast<Eigen::Index>(c)).real());
            row.push_back(v(static_cast<Eigen::Index>(c)).imag());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline TableArtifact spectrum_table(const DualFamily& d)
{
    TableArtifact t = spectrum_table([&d](double y) { return d.at(y); }, d.arity(), {});
    for (std::size_t n = 0; n < d.nodes.size(); ++n) {
        std::vector<double> row{d.nodes[n].y};
        for (std::size_t c = 0; c < d.arity(); ++c) {
            row.push_back(d.spectra[c][n].real());
            row.push_back(d.spectra[c][n].imag());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Columns t, phi1, ... (real parts); im_phi1, ... appended only if some |imag| > 1e-9.
inline TableArtifact kernel_table(const std::vector<TimeKernel>& kernels, const std::vector<double>& ts)
{
    TableArtifact t;
    t.kind = TableKind::KernelTable;
    t.header.push_back("t");
    for (std::size_t c = 1; c <= kernels.size(); ++c) t.header.push_back("phi" + std::to_string(c));
    std::vector<std::vector<Complex>> vals(kernels.size(), std::vector<Complex>(ts.size()));
    bool any_imag = false;
    for (std::size_t c = 0; c < kernels.size(); ++c) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
            vals[c][i] = kernels[c].eval(ts[i]);
            any_imag = any_imag || std::abs(vals[c][i].imag()) > 1e-9;
        }
    }
    if (any_imag) {
        for (std::size_t c = 1; c <= kernels.size(); ++c) t.header.push_back("im_phi" + std::to_string(c));
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::vector<double> row{ts[i]};
        for (std::size_t c = 0; c < kernels.size(); ++c) row.push_back(vals[c][i].real());
        if (any_imag) {
            for (std::size_t c = 0; c < kernels.size(); ++c) row.push_back(vals[c][i].imag());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- frame report JSON -------------------------------------------------------

inline nlohmann::ordered_json report_to_json(const FrameReport& r)
{
    nlohmann::ordered_json j;
    j["omega"] = r.spec.omega;
    j["t_o"] = r.spec.t_o;
    j["h"] = r.spec.h;
    j["ell"] = r.spec.ell;
    j["regime"] = std::string(to_string(r.spec.regime));
    j["N"] = r.spec.n_generators;
    j["verdict"] = std::string(to_string(r.verdict));
    j["delta"] = r.delta;
    j["gamma"] = r.gamma;
    j["sigma"] = r.sigma ? nlohmann::ordered_json(*r.sigma) : nlohmann::ordered_json(nullptr);
    j["eta"] = r.eta ? nlohmann::ordered_json(*r.eta) : nlohmann::ordered_json(nullptr);
    j["A"] = r.lower_bound_A;
    j["B"] = r.upper_bound_B;
    j["grid_size"] = r.grid_size;
    return j;
}

inline TableArtifact report_artifact(const FrameReport& r)
{
    TableArtifact t;
    t.kind = TableKind::FrameReportJSON;
    t.report = report_to_json(r);
    return t;
}

inline Verdict parse_verdict(const std::string& s)
{
    if (s == "RieszBasis") return Verdict::RieszBasis;
    if (s == "Frame") return Verdict::Frame;
    if (s == "NotFrame") return Verdict::NotFrame;
    throw InvalidArgument("unknown verdict '" + s + "'");
}

inline FrameReport report_from_json(const nlohmann::ordered_json& j)
{
    try {
        FrameReport r;
        r.spec = band_spec_from_h(j.at("omega").get<double>(), j.at("h").get<double>(), j.at("t_o").get<double>());
        if (r.spec.ell != j.at("ell").get<int>() || r.spec.n_generators != j.at("N").get<int>() ||
            std::string(to_string(r.spec.regime)) != j.at("regime").get<std::string>()) {
            throw InvalidArgument("report regime fields are inconsistent with omega and h");
        }
        r.verdict = parse_verdict(j.at("verdict").get<std::string>());
        r.delta = j.at("delta").get<double>();
        r.gamma = j.at("gamma").get<double>();
        if (!j.at("sigma").is_null()) r.sigma = j.at("sigma").get<double>();
        if (!j.at("eta").is_null()) r.eta = j.at("eta").get<double>();
        r.lower_bound_A = j.at("A").get<double>();
        r.upper_bound_B = j.at("B").get<double>();
        r.grid_size = j.at("grid_size").get<std::size_t>();
        r.necessary_condition = r.delta > 0.0 && std::isfinite(r.gamma);
        r.sigma_from_delta = r.spec.ell == 1;
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed frame report: ") + e.what());
    }
}

inline FrameReport parse_report(const std::string& text)
{
    try {
        return report_from_json(nlohmann::ordered_json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("frame report is not valid JSON: ") + e.what());
    }
}

} // namespace bandframe
