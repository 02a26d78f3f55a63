#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

namespace bandframe {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// A function of one real frequency variable, e.g. a Fourier transform on [-omega, omega].
using Spectrum = std::function<Complex(double)>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline const double kSqrtTwoPi = std::sqrt(kTwoPi);

/// Relative tolerance used to recognise regime boundaries (h = omega/l, h = omega/(l - 1/2)).
inline constexpr double kBoundarySnap = 1e-12;

/// sin(u)/u with the removable singularity filled in.
inline double sinc(double u)
{
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

} // namespace bandframe
