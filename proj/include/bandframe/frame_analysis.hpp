#pragma once

// Fiberwise frame analysis of a generator family: pre-Gramian, Gramian, dual
// Gramian, the Omega_k functions, and the frame / Riesz basis verdict.

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bandframe/errors.hpp"
#include "bandframe/generators.hpp"
#include "bandframe/matrix_kernels.hpp"
#include "bandframe/parallel.hpp"
#include "bandframe/spectral_core.hpp"

namespace bandframe {

/// Rows: active shifts of sub (ascending). Columns: generators.
/// Entry (j, i) = sqrt(h) * phi_i(x + j h).
inline ComplexMatrix pre_gramian(const GeneratorFamily& family, double x, const SubInterval& sub)
{
    const BandSpec& spec = family.spec();
    const double root_h = std::sqrt(spec.h);
    const auto& gens = family.generators();
    ComplexMatrix j(static_cast<Eigen::Index>(sub.active_shifts.size()), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t r = 0; r < sub.active_shifts.size(); ++r) {
        const double y = x + sub.active_shifts[r] * spec.h;
        for (std::size_t c = 0; c < gens.size(); ++c) {
            j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = root_h * gens[c](y);
        }
    }
    return j;
}

/// Pre-Gramian on the sub-interval whose interior contains x.
inline ComplexMatrix pre_gramian(const GeneratorFamily& family, double x)
{
    return pre_gramian(family, x, family.spec().partition[locate(family.spec(), x)]);
}

/// Same matrix, right-continuous at breakpoints (see locate_from_right).
inline ComplexMatrix pre_gramian_right(const GeneratorFamily& family, double x)
{
    return pre_gramian(family, x, family.spec().partition[locate_from_right(family.spec(), x)]);
}

/// G = J* J, entries [phi_l, phi_j](x).
inline ComplexMatrix gramian(const GeneratorFamily& family, double x)
{
    const ComplexMatrix j = pre_gramian(family, x);
    return j.adjoint() * j;
}

/// J J*, indexed by the active shifts.
inline ComplexMatrix dual_gramian(const GeneratorFamily& family, double x)
{
    const ComplexMatrix j = pre_gramian(family, x);
    return j * j.adjoint();
}

/// h * sum_j phi_j(x) conj(phi_j(x + k h)).
inline Complex omega_k(const GeneratorFamily& family, int k, double x)
{
    const double h = family.spec().h;
    Complex sum{0.0, 0.0};
    for (const auto& g : family.generators()) {
        sum += g(x) * std::conj(g(x + k * h));
    }
    return h * sum;
}

enum class Verdict { RieszBasis, Frame, NotFrame };

inline std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::RieszBasis: return "RieszBasis";
    case Verdict::Frame: return "Frame";
    case Verdict::NotFrame: return "NotFrame";
    }
    return "?";
}

struct FrameThresholds {
    double delta = 1e-10;
    double sigma = 1e-10;
    double eta = 1e-10;
};

struct FrameReport {
    BandSpec spec;
    Verdict verdict = Verdict::NotFrame;
    double delta = 0.0;
    double gamma = 0.0;
    /// Absent when no reduced sub-interval is populated.
    std::optional<double> sigma;
    /// Absent when no full-rank sub-interval is populated.
    std::optional<double> eta;
    double lower_bound_A = 0.0;
    double upper_bound_B = 0.0;
    std::size_t grid_size = 0;
    /// delta > 0 and gamma finite: necessary for any frame.
    bool necessary_condition = false;
    /// For ell = 1 the reduced fiber is a single row and its check reduces to delta.
    bool sigma_from_delta = false;
    /// Set when the x4 refinement self-check ran.
    std::optional<bool> refinement_consistent;
};

namespace detail {

struct NodeStats {
    double sum_min = std::numeric_limits<double>::infinity();
    double sum_max = 0.0;
    double sigma = std::numeric_limits<double>::infinity();
    double eta = std::numeric_limits<double>::infinity();
    double a = std::numeric_limits<double>::infinity();
    double b = 0.0;
    bool any_reduced = false;
    bool any_full = false;

    void merge(const NodeStats& o)
    {
        sum_min = std::min(sum_min, o.sum_min);
        sum_max = std::max(sum_max, o.sum_max);
        sigma = std::min(sigma, o.sigma);
        eta = std::min(eta, o.eta);
        a = std::min(a, o.a);
        b = std::max(b, o.b);
        any_reduced = any_reduced || o.any_reduced;
        any_full = any_full || o.any_full;
    }
};

inline NodeStats fiber_stats(const GeneratorFamily& family, double x, const SubInterval& sub)
{
    NodeStats s;
    const ComplexMatrix j = pre_gramian(family, x);
    const double h = family.spec().h;
    // Each row of J is one band frequency; its squared norm is h * sum_j |phi_j|^2 there.
    for (Eigen::Index r = 0; r < j.rows(); ++r) {
        const double v = j.row(r).squaredNorm() / h;
        s.sum_min = std::min(s.sum_min, v);
        s.sum_max = std::max(s.sum_max, v);
    }
    if (sub.full_rank_expected) {
        s.any_full = true;
        s.eta = std::abs(determinant(j));
    } else {
        s.any_reduced = true;
        s.sigma = minor_sum(j);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(j * j.adjoint(), Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    s.a = std::max(0.0, ev(0));
    s.b = ev(ev.size() - 1);
    return s;
}

inline FrameReport check_frame_once(const GeneratorFamily& family, const FrequencyGrid& grid,
                                    const FrameThresholds& thr)
{
    const BandSpec& spec = family.spec();
    const std::size_t n = grid.nodes.size();
    std::vector<NodeStats> per(n);
    parallel_for(n, [&](std::size_t i) {
        per[i] = fiber_stats(family, grid.nodes[i], spec.partition[grid.interval_of_node[i]]);
    });
    NodeStats all;
    for (const auto& s : per) all.merge(s);

    FrameReport r;
    r.spec = spec;
    r.grid_size = n;
    r.delta = all.sum_min;
    r.gamma = all.sum_max;
    if (all.any_reduced) r.sigma = all.sigma;
    if (all.any_full) r.eta = all.eta;
    r.lower_bound_A = all.a;
    r.upper_bound_B = all.b;
    r.necessary_condition = r.delta > thr.delta && std::isfinite(r.gamma);
    r.sigma_from_delta = spec.ell == 1;

    bool ok = r.delta > thr.delta && std::isfinite(r.gamma);
    if (r.sigma && !r.sigma_from_delta) ok = ok && *r.sigma > thr.sigma;
    if (r.eta) ok = ok && *r.eta > thr.eta;
    if (!ok) {
        r.verdict = Verdict::NotFrame;
    } else {
        r.verdict = spec.riesz_boundary() ? Verdict::RieszBasis : Verdict::Frame;
    }
    return r;
}

} // namespace detail

/// Estimates delta, gamma, sigma, eta and the frame bounds on the grid and decides the verdict.
/// With refine set, the analysis is repeated on a grid four times finer and the verdicts are compared.
inline FrameReport check_frame(const GeneratorFamily& family, const FrequencyGrid& grid,
                               const FrameThresholds& thresholds = {}, bool refine = false)
{
    FrameReport r = detail::check_frame_once(family, grid, thresholds);
    if (refine) {
        const FrequencyGrid fine = make_frequency_grid(family.spec(), 4 * std::max<std::size_t>(grid.nodes.size(), 1));
        r.refinement_consistent = detail::check_frame_once(family, fine, thresholds).verdict == r.verdict;
    }
    return r;
}

inline FrameReport check_frame(const GeneratorFamily& family, std::size_t grid_size = kDefaultGridSize)
{
    return check_frame(family, make_frequency_grid(family.spec(), grid_size));
}

struct FrameBounds {
    double A = 0.0;
    double B = 0.0;
};

/// A = min sigma_min(J)^2 and B = max sigma_max(J)^2 over the grid.
inline FrameBounds frame_bounds(const GeneratorFamily& family, const FrequencyGrid& grid)
{
    const FrameReport r = check_frame(family, grid);
    if (r.verdict == Verdict::NotFrame) {
        throw NotFrame("frame_bounds: family '" + family.tag() + "' is not a frame");
    }
    return {r.lower_bound_A, r.upper_bound_B};
}

} // namespace bandframe
