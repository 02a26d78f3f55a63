#pragma once

// Generator spectra of the form m(x) * indicator[-omega, omega](x), where m is a
// piecewise polynomial optionally multiplied by sign(x).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bandframe/errors.hpp"
#include "bandframe/spectral_core.hpp"
#include "bandframe/types.hpp"

namespace bandframe {

/// One polynomial piece on [lo, hi]; coefficients in ascending powers of x.
struct PolyPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<Complex> coeffs;
    /// Multiply the polynomial by sign(x), with sign(0) = 0.
    bool times_sign = false;

    [[nodiscard]] Complex operator()(double x) const
    {
        Complex acc{0.0, 0.0};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            acc = acc * x + *it;
        }
        if (times_sign) {
            acc *= (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        }
        return acc;
    }
};

inline double sign_of(double x)
{
    return (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

class GeneratorSpectrum {
public:
    GeneratorSpectrum() = default;

    GeneratorSpectrum(std::string label, double omega, std::vector<PolyPiece> pieces)
        : label_(std::move(label)), omega_(omega), pieces_(std::move(pieces))
    {
        if (!(omega_ > 0.0 && std::isfinite(omega_))) {
            throw InvalidArgument("generator " + label_ + ": omega must be positive");
        }
        std::ranges::sort(pieces_, {}, &PolyPiece::lo);
        for (const auto& p : pieces_) {
            if (!(p.hi > p.lo)) {
                throw InvalidArgument("generator " + label_ + ": empty or reversed piece");
            }
            if (p.lo < -omega_ - 1e-12 * omega_ || p.hi > omega_ + 1e-12 * omega_) {
                throw InvalidArgument("generator " + label_ + ": piece extends beyond [-omega, omega]");
            }
        }
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
            if (pieces_[i].lo < pieces_[i - 1].hi - 1e-12 * omega_) {
                throw InvalidArgument("generator " + label_ + ": overlapping pieces");
            }
        }
    }

    /// m(x) on the band, 0 outside. At a shared breakpoint the piece on the right wins.
    [[nodiscard]] Complex operator()(double x) const
    {
        if (!(std::abs(x) <= omega_)) {
            return {0.0, 0.0};
        }
        for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
            if (x >= it->lo && x <= it->hi) {
                return (*it)(x);
            }
        }
        return {0.0, 0.0};
    }

    /// Interior points where the spectrum may fail to be smooth.
    [[nodiscard]] std::vector<double> breakpoints() const
    {
        std::vector<double> out;
        for (const auto& p : pieces_) {
            out.push_back(p.lo);
            out.push_back(p.hi);
            if (p.times_sign && p.lo < 0.0 && p.hi > 0.0) out.push_back(0.0);
        }
        std::ranges::sort(out);
        return out;
    }

    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] const std::vector<PolyPiece>& pieces() const { return pieces_; }

    [[nodiscard]] Spectrum as_spectrum() const
    {
        return [self = *this](double x) { return self(x); };
    }

    /// Same spectrum multiplied by a constant.
    [[nodiscard]] GeneratorSpectrum scaled(Complex c) const
    {
        auto pieces = pieces_;
        for (auto& p : pieces) {
            for (auto& a : p.coeffs) a *= c;
        }
        return {label_, omega_, std::move(pieces)};
    }

private:
    std::string label_;
    double omega_ = 1.0;
    std::vector<PolyPiece> pieces_;
};

/// c * x^k on the whole band.
inline GeneratorSpectrum monomial_generator(std::string label, double omega, Complex c, int k, bool times_sign = false)
{
    std::vector<Complex> coeffs(static_cast<std::size_t>(k + 1), Complex{0.0, 0.0});
    coeffs.back() = c;
    return {std::move(label), omega, {PolyPiece{-omega, omega, std::move(coeffs), times_sign}}};
}

inline GeneratorSpectrum unit_generator(double omega)
{
    return monomial_generator("unit", omega, 1.0, 0);
}

/// -i sign(x): the Hilbert transform multiplier.
inline GeneratorSpectrum hilbert_generator(double omega)
{
    return monomial_generator("hilbert", omega, Complex{0.0, -1.0}, 0, true);
}

/// (ix)^k: the k-th derivative multiplier.
inline GeneratorSpectrum derivative_generator(double omega, int k)
{
    Complex c{1.0, 0.0};
    for (int i = 0; i < k; ++i) c *= Complex{0.0, 1.0};
    return monomial_generator("d" + std::to_string(k), omega, c, k);
}

/// Piecewise-linear triangle spectrum (1 - |x|/b)_+ truncated to the band.
inline GeneratorSpectrum triangle_spectrum(double omega, double b)
{
    if (!(b > 0.0) || b > omega * (1.0 + 1e-12)) {
        throw InvalidArgument("triangle spectrum: band b must lie in (0, omega]");
    }
    return {"triangle", omega,
            {PolyPiece{-b, 0.0, {1.0, 1.0 / b}, false}, PolyPiece{0.0, b, {1.0, -1.0 / b}, false}}};
}

class GeneratorFamily {
public:
    GeneratorFamily(BandSpec spec, std::vector<GeneratorSpectrum> generators, std::string tag = "custom")
        : spec_(std::move(spec)), generators_(std::move(generators)), tag_(std::move(tag))
    {
        if (static_cast<int>(generators_.size()) != spec_.n_generators) {
            throw DimensionMismatch("family '" + tag_ + "' has " + std::to_string(generators_.size()) +
                                    " generators but the band needs exactly " +
                                    std::to_string(spec_.n_generators));
        }
        for (const auto& g : generators_) {
            if (std::abs(g.omega() - spec_.omega) > 1e-12 * spec_.omega) {
                throw InvalidArgument("generator " + g.label() + " was built for a different omega");
            }
        }
    }

    [[nodiscard]] const BandSpec& spec() const { return spec_; }
    [[nodiscard]] const std::vector<GeneratorSpectrum>& generators() const { return generators_; }
    [[nodiscard]] std::size_t size() const { return generators_.size(); }
    [[nodiscard]] const std::string& tag() const { return tag_; }

    /// (phi_1(y), ..., phi_N(y)).
    [[nodiscard]] ComplexVector values(double y) const
    {
        ComplexVector v(static_cast<Eigen::Index>(generators_.size()));
        for (std::size_t i = 0; i < generators_.size(); ++i) {
            v(static_cast<Eigen::Index>(i)) = generators_[i](y);
        }
        return v;
    }

    /// Breakpoints of every generator, folded over all h-shifts that stay in the band.
    [[nodiscard]] std::vector<double> band_breakpoints() const
    {
        std::vector<double> seeds{-spec_.omega, spec_.omega};
        for (const auto& g : generators_) {
            for (double b : g.breakpoints()) seeds.push_back(b);
        }
        std::vector<double> out;
        const double w = spec_.omega;
        const double h = spec_.h;
        const int reach = static_cast<int>(std::ceil(2.0 * w / h)) + 1;
        for (double b : seeds) {
            for (int k = -reach; k <= reach; ++k) {
                const double y = b + k * h;
                if (y >= -w * (1.0 + 1e-12) && y <= w * (1.0 + 1e-12)) {
                    out.push_back(std::clamp(y, -w, w));
                }
            }
        }
        std::ranges::sort(out);
        std::vector<double> unique;
        for (double y : out) {
            if (unique.empty() || y - unique.back() > 1e-11 * w) unique.push_back(y);
        }
        return unique;
    }

private:
    BandSpec spec_;
    std::vector<GeneratorSpectrum> generators_;
    std::string tag_;
};

inline GeneratorFamily hilbert_family(const BandSpec& spec)
{
    return {spec, {unit_generator(spec.omega), hilbert_generator(spec.omega)}, "hilbert"};
}

/// (1, ix, (ix)^2, ..., (ix)^{n-1}).
inline GeneratorFamily derivative_family(const BandSpec& spec, int n)
{
    std::vector<GeneratorSpectrum> g;
    for (int k = 0; k < n; ++k) g.push_back(derivative_generator(spec.omega, k));
    return {spec, std::move(g), "derivative" + std::to_string(n)};
}

/// (1, m) for a user multiplier m.
inline GeneratorFamily multiplier_family(const BandSpec& spec, GeneratorSpectrum m)
{
    return {spec, {unit_generator(spec.omega), std::move(m)}, "multiplier"};
}

} // namespace bandframe
