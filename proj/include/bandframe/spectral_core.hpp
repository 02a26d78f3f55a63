#pragma once

// Regime arithmetic for the space of band-limited functions: the number of
// generators needed for a given shift step, the partition of the fiber period
// [0, h) into sub-intervals with a fixed set of non-vanishing shifts, and the
// bracket product that periodizes f * conj(g) with period h.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "bandframe/errors.hpp"
#include "bandframe/types.hpp"

namespace bandframe {

enum class Regime { Even, Odd };

enum class IntervalLabel { IMinus, IMid, IPlus, KMinus, KMid, KPlus };

inline std::string_view to_string(Regime r)
{
    return r == Regime::Even ? "Even" : "Odd";
}

inline std::string_view to_string(IntervalLabel label)
{
    switch (label) {
    case IntervalLabel::IMinus: return "IMinus";
    case IntervalLabel::IMid: return "IMid";
    case IntervalLabel::IPlus: return "IPlus";
    case IntervalLabel::KMinus: return "KMinus";
    case IntervalLabel::KMid: return "KMid";
    case IntervalLabel::KPlus: return "KPlus";
    }
    return "?";
}

struct SubInterval {
    IntervalLabel label{};
    double lo = 0.0;
    double hi = 0.0;
    /// Shifts j for which x + j*h can land in [-omega, omega] when x is in (lo, hi).
    std::vector<int> active_shifts;
    /// True where the pre-Gramian is square (N x N); false where it loses a row.
    bool full_rank_expected = false;

    [[nodiscard]] bool empty() const { return !(hi > lo); }
    [[nodiscard]] double length() const { return empty() ? 0.0 : hi - lo; }
    [[nodiscard]] bool contains(double x) const { return x > lo && x < hi; }
};

struct BandSpec {
    double omega = 0.0;
    double t_o = 0.0;
    double h = 0.0;
    int ell = 0;
    int n_generators = 0;
    Regime regime = Regime::Even;
    std::array<SubInterval, 3> partition;

    /// True when every reduced sub-interval is empty, i.e. h sits on the left edge of its regime.
    [[nodiscard]] bool riesz_boundary() const
    {
        return std::ranges::all_of(partition, [](const SubInterval& s) {
            return s.full_rank_expected || s.empty();
        });
    }
};

/// Greatest integer strictly less than a.
inline long long strict_floor(double a)
{
    if (!std::isfinite(a)) {
        throw InvalidArgument("strict_floor: non-finite input");
    }
    const double f = std::floor(a);
    if (f == a) {
        return static_cast<long long>(f) - 1;
    }
    return static_cast<long long>(f);
}

namespace detail {

inline std::vector<int> shift_range(int first, int last)
{
    std::vector<int> out;
    for (int j = first; j <= last; ++j) {
        out.push_back(j);
    }
    return out;
}

inline double snap_to_integer(double v)
{
    const double r = std::round(v);
    if (std::abs(v - r) <= kBoundarySnap * std::max(1.0, std::abs(v))) {
        return r;
    }
    return v;
}

} // namespace detail

/// Builds the regime record for band edge omega and shift step t_o (h = 2*pi/t_o).
inline BandSpec band_spec_from_h(double omega, double h, double t_o)
{
    if (!(std::isfinite(omega) && omega > 0.0)) {
        throw InvalidArgument("omega must be a positive finite number");
    }
    if (!(std::isfinite(h) && h > 0.0)) {
        throw InvalidArgument("t_o must be a positive finite number");
    }

    // 2*omega/h decides everything: N = ceil(2*omega/h), the regime is its parity.
    const double q = detail::snap_to_integer(2.0 * omega / h);
    if (q <= 1.0) {
        throw DegenerateRegime("h >= 2*omega: a single generator spans B_omega; "
                               "the multi-channel frame theory does not apply");
    }

    BandSpec spec;
    spec.omega = omega;
    spec.t_o = t_o;
    spec.h = h;
    spec.ell = static_cast<int>(strict_floor(q / 2.0)) + 1;
    spec.n_generators = static_cast<int>(std::ceil(q));
    spec.regime = (spec.n_generators % 2 == 0) ? Regime::Even : Regime::Odd;

    const int l = spec.ell;
    const double tol = kBoundarySnap * h;
    auto clean = [&](double v) {
        if (std::abs(v) <= tol) return 0.0;
        if (std::abs(v - h) <= tol) return h;
        return std::clamp(v, 0.0, h);
    };

    if (spec.regime == Regime::Even) {
        const double a = clean(l * h - omega);
        double b = clean(omega - (l - 1) * h);
        if (std::abs(b - a) <= tol) b = a;
        spec.partition[0] = {IntervalLabel::IMinus, 0.0, a, detail::shift_range(-(l - 1), l - 1), false};
        spec.partition[1] = {IntervalLabel::IMid, a, std::max(a, b), detail::shift_range(-l, l - 1), true};
        spec.partition[2] = {IntervalLabel::IPlus, std::max(a, b), h, detail::shift_range(-l, l - 2), false};
    } else {
        const double a = clean(omega - (l - 1) * h);
        double b = clean(l * h - omega);
        if (std::abs(b - a) <= tol) b = a;
        spec.partition[0] = {IntervalLabel::KMinus, 0.0, a, detail::shift_range(-(l - 1), l - 1), true};
        spec.partition[1] = {IntervalLabel::KMid, a, std::max(a, b), detail::shift_range(-(l - 1), l - 2), false};
        spec.partition[2] = {IntervalLabel::KPlus, std::max(a, b), h, detail::shift_range(-l, l - 2), true};
    }
    return spec;
}

inline BandSpec make_band_spec(double omega, double t_o)
{
    if (!(std::isfinite(t_o) && t_o > 0.0)) {
        throw InvalidArgument("t_o must be a positive finite number");
    }
    return band_spec_from_h(omega, kTwoPi / t_o, t_o);
}

/// Convenience for the ubiquitous parameterization h = ratio * omega.
inline BandSpec make_band_spec_ratio(double omega, double ratio)
{
    if (!(std::isfinite(ratio) && ratio > 0.0)) {
        throw InvalidArgument("h ratio must be a positive finite number");
    }
    const double h = ratio * omega;
    return band_spec_from_h(omega, h, kTwoPi / h);
}

/// Index of the sub-interval whose interior contains x (x in [0, h)).
inline std::size_t locate(const BandSpec& spec, double x)
{
    for (std::size_t i = 0; i < spec.partition.size(); ++i) {
        if (spec.partition[i].contains(x)) {
            return i;
        }
    }
    throw BoundaryAmbiguous("fiber abscissa " + std::to_string(x) +
                            " is on a sub-interval breakpoint or outside [0, h)");
}

/// Right-continuous variant of locate for pointwise evaluation: a breakpoint goes to the
/// nonempty sub-interval that starts there (x = 0 included).
inline std::size_t locate_from_right(const BandSpec& spec, double x)
{
    for (std::size_t i = 0; i < spec.partition.size(); ++i) {
        const SubInterval& sub = spec.partition[i];
        if (!sub.empty() && x >= sub.lo && x < sub.hi) {
            return i;
        }
    }
    throw BoundaryAmbiguous("fiber abscissa " + std::to_string(x) + " is outside [0, h)");
}

/// Splits a band frequency y as y = x + j*h with x in [0, h).
struct FiberCoordinate {
    double x = 0.0;
    int shift = 0;
};

inline FiberCoordinate to_fiber(const BandSpec& spec, double y)
{
    const double j = std::floor(y / spec.h);
    double x = y - j * spec.h;
    int shift = static_cast<int>(j);
    if (x >= spec.h) {
        x -= spec.h;
        ++shift;
    }
    if (x < 0.0) {
        x += spec.h;
        --shift;
    }
    return {x, shift};
}

/// h * sum_j f(x + j h) conj(g(x + j h)) over the finitely many j landing in the band.
inline Complex bracket(const Spectrum& fhat, const Spectrum& ghat, double x, const BandSpec& spec)
{
    const double h = spec.h;
    const auto first = static_cast<long long>(std::ceil((-spec.omega - x) / h));
    const auto last = static_cast<long long>(std::floor((spec.omega - x) / h));
    Complex sum{0.0, 0.0};
    for (long long j = first; j <= last; ++j) {
        const double y = x + static_cast<double>(j) * h;
        sum += fhat(y) * std::conj(ghat(y));
    }
    return h * sum;
}

/// The column segment (sqrt(h) fhat(x + j h))_j over the sub-interval's active shifts.
inline ComplexVector fiber_vector(const Spectrum& fhat, double x, const SubInterval& sub, const BandSpec& spec)
{
    if (!sub.contains(x)) {
        throw BoundaryAmbiguous("fiber_vector: x = " + std::to_string(x) +
                                " is not strictly inside " + std::string(to_string(sub.label)));
    }
    const double root_h = std::sqrt(spec.h);
    ComplexVector v(static_cast<Eigen::Index>(sub.active_shifts.size()));
    for (std::size_t r = 0; r < sub.active_shifts.size(); ++r) {
        v(static_cast<Eigen::Index>(r)) = root_h * fhat(x + sub.active_shifts[r] * spec.h);
    }
    return v;
}

/// Discretization of [0, h) used to approximate the a.e. statements.
struct FrequencyGrid {
    BandSpec spec;
    std::vector<double> nodes;
    std::vector<std::size_t> interval_of_node;
    /// Nodes sit at lo + (m + offset) * step inside each sub-interval.
    double offset = 0.5;
};

inline constexpr std::size_t kDefaultGridSize = 4096;

inline FrequencyGrid make_frequency_grid(const BandSpec& spec, std::size_t size = kDefaultGridSize,
                                         std::size_t min_per_interval = 16)
{
    if (size == 0) {
        throw InvalidArgument("grid size must be positive");
    }
    FrequencyGrid grid;
    grid.spec = spec;
    // Largest-remainder split so the shares add up to size exactly.
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < spec.partition.size(); ++i) {
        const SubInterval& sub = spec.partition[i];
        if (sub.empty()) {
            remainder[i] = -1.0;
            continue;
        }
        const double raw = static_cast<double>(size) * sub.length() / spec.h;
        counts[i] = static_cast<std::size_t>(std::floor(raw));
        remainder[i] = raw - std::floor(raw);
        assigned += counts[i];
    }
    while (assigned < size) {
        const auto best = static_cast<std::size_t>(std::ranges::max_element(remainder) - remainder.begin());
        if (remainder[best] < 0.0) break;
        ++counts[best];
        remainder[best] = -1.0;
        ++assigned;
    }
    for (std::size_t i = 0; i < spec.partition.size(); ++i) {
        const SubInterval& sub = spec.partition[i];
        if (sub.empty()) {
            continue;
        }
        const std::size_t n = std::max(min_per_interval, counts[i]);
        const double step = sub.length() / static_cast<double>(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double x = sub.lo + (static_cast<double>(m) + grid.offset) * step;
            if (!sub.contains(x)) {
                continue;
            }
            grid.nodes.push_back(x);
            grid.interval_of_node.push_back(i);
        }
    }
    return grid;
}

/// A band frequency y = x + shift*h reached from a fiber node.
struct BandNode {
    double y = 0.0;
    double x = 0.0;
    int shift = 0;
    std::size_t node = 0;
};

/// Every band frequency reachable from the grid, sorted by y.
inline std::vector<BandNode> band_nodes(const FrequencyGrid& grid)
{
    std::vector<BandNode> out;
    const BandSpec& spec = grid.spec;
    for (std::size_t n = 0; n < grid.nodes.size(); ++n) {
        const double x = grid.nodes[n];
        for (int j : spec.partition[grid.interval_of_node[n]].active_shifts) {
            const double y = x + j * spec.h;
            if (y >= -spec.omega && y <= spec.omega) {
                out.push_back({y, x, j, n});
            }
        }
    }
    std::ranges::sort(out, {}, &BandNode::y);
    return out;
}

} // namespace bandframe
