#pragma once

// bandframe command line: analyze | duals | reconstruct | reproduce.
// Exit codes: 0 success, 1 configuration or numeric error, 2 the family is not a frame.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandframe/bandframe.hpp"

namespace bandframe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotFrame = 2;

/// Parses "0.75" or "3/4".
inline double parse_ratio(const std::string& text)
{
    auto to_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("cannot parse '" + text + "' as a number");
        }
        if (used != s.size()) throw InvalidArgument("cannot parse '" + text + "' as a number");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) return to_double(text);
    const double num = to_double(text.substr(0, slash));
    const double den = to_double(text.substr(slash + 1));
    if (den == 0.0) throw InvalidArgument("zero denominator in '" + text + "'");
    return num / den;
}

/// Ratios typed with four or five digits (0.6667) are meant to be the regime edge 2/3:
/// snap to 1/l or 2/(2l - 1) when within 1e-4 relative.
inline double snap_ratio(double r)
{
    for (int l = 1; l <= 64; ++l) {
        for (double edge : {1.0 / l, 2.0 / (2.0 * l - 1.0)}) {
            if (std::abs(r - edge) <= 1e-4 * edge) return edge;
        }
    }
    return r;
}

/// "a:b" window.
inline std::pair<double, double> parse_window(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("window must look like a:b, got '" + text + "'");
    const double a = parse_ratio(text.substr(0, colon));
    const double b = parse_ratio(text.substr(colon + 1));
    if (!(b > a)) throw InvalidArgument("window '" + text + "' is empty");
    return {a, b};
}

namespace detail {

inline Complex parse_complex(const nlohmann::json& j)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw InvalidArgument("coefficient must be a number, [re, im] or {re, im}");
}

inline GeneratorSpectrum parse_generator(const nlohmann::json& g, double omega, std::size_t index)
{
    const std::string label = g.value("label", "g" + std::to_string(index + 1));
    if (g.contains("builtin")) {
        const std::string b = g.at("builtin").get<std::string>();
        if (b == "unit") return unit_generator(omega);
        if (b == "sign") return monomial_generator(label, omega, 1.0, 0, true);
        if (b == "hilbert") return hilbert_generator(omega);
        if (b == "ix") return derivative_generator(omega, 1);
        if (b == "-x2") return derivative_generator(omega, 2);
        throw InvalidArgument("unknown builtin multiplier '" + b + "'");
    }
    std::vector<PolyPiece> pieces;
    for (const auto& p : g.at("pieces")) {
        PolyPiece piece;
        piece.lo = p.value("lo", -omega);
        piece.hi = p.value("hi", omega);
        for (const auto& c : p.at("coeffs")) piece.coeffs.push_back(parse_complex(c));
        piece.times_sign = p.value("sign", false);
        pieces.push_back(std::move(piece));
    }
    return {label, omega, std::move(pieces)};
}

} // namespace detail

/// Custom family: {"generators": [{"builtin": "unit"} | {"pieces": [{"lo", "hi", "coeffs", "sign"}]}, ...]}.
inline GeneratorFamily load_family(const std::string& path, const BandSpec& spec)
{
    std::ifstream is(path);
    if (!is) throw IoError("cannot open family file '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
        std::vector<GeneratorSpectrum> gens;
        std::size_t i = 0;
        for (const auto& g : j.at("generators")) gens.push_back(detail::parse_generator(g, spec.omega, i++));
        return {spec, std::move(gens), j.value("name", std::string("custom"))};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("family file '" + path + "': " + e.what());
    }
}

struct Options {
    double omega = 1.0;
    std::optional<double> t_o;
    std::optional<std::string> h_ratio;
    std::string scheme;
    std::string family_path;
    std::size_t grid = kDefaultGridSize;
    int K = 64;
    std::string window = "-10:10";
    double step = 0.01;
    std::string out = ".";
    bool cross_validate = false;
    std::string signal = "sinc2";
    std::size_t M = kDefaultQuadratureNodes;
    std::string kernel_window = "-20:20";
    double kernel_step = 0.05;
    bool refine = false;
    std::string figure;
};

inline BandSpec spec_from(const Options& o)
{
    if (o.t_o.has_value() == o.h_ratio.has_value()) {
        throw InvalidArgument("give exactly one of --t-o and --h-ratio");
    }
    if (o.t_o) return make_band_spec(o.omega, *o.t_o);
    const double r = snap_ratio(parse_ratio(*o.h_ratio));
    if (!(r > 0.0 && r < 2.0)) throw InvalidArgument("--h-ratio must lie in (0, 2)");
    return make_band_spec_ratio(o.omega, r);
}

inline GeneratorFamily family_from(const Options& o, const BandSpec& spec)
{
    if (!o.scheme.empty() && !o.family_path.empty()) throw InvalidArgument("give --scheme or --family, not both");
    if (!o.family_path.empty()) return load_family(o.family_path, spec);
    if (o.scheme.empty()) throw InvalidArgument("one of --scheme or --family is required");
    return scheme_family(parse_scheme(o.scheme), spec);
}

inline std::string out_path(const Options& o, const std::string& name)
{
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

inline int cmd_analyze(const Options& o, std::ostream& out)
{
    const BandSpec spec = spec_from(o);
    const GeneratorFamily fam = family_from(o, spec);
    const FrameReport r = check_frame(fam, make_frequency_grid(spec, o.grid), {}, o.refine);
    const TableArtifact art = report_artifact(r);
    emit_table(art, out_path(o, "frame_report.json"));
    out << art.report.dump(2) << "\n";
    if (!r.necessary_condition) {
        out << "necessary condition fails: sum_j |phi_j|^2 is not bounded away from zero on the band\n";
    }
    if (r.refinement_consistent && !*r.refinement_consistent) {
        out << "warning: the verdict changes on a grid four times finer\n";
    }
    return r.verdict == Verdict::NotFrame ? kExitNotFrame : kExitOk;
}

struct DualsOutput {
    double max_discrepancy = 0.0;
    bool cross_validated = false;
};

inline DualsOutput write_duals(const GeneratorFamily& fam, const Options& o, const std::string& stem,
                               std::ostream& out)
{
    const BandSpec& spec = fam.spec();
    const FrequencyGrid grid = make_frequency_grid(spec, o.grid);
    std::optional<Scheme> scheme;
    if (o.family_path.empty() && !o.scheme.empty()) scheme = parse_scheme(o.scheme);

    DualFamily primary = scheme ? builtin_scheme(*scheme, spec.omega, spec.t_o, o.grid).duals
                                : duals_pointwise(fam, grid);
    TableArtifact spectra = spectrum_table(primary);
    DualsOutput result;
    if (o.cross_validate) {
        std::vector<DualFamily> others;
        others.push_back(duals_pointwise(fam, grid));
        const int n = static_cast<int>(fam.size());
        if (n >= 2 && n <= 4) {
            try {
                others.push_back(duals_closed_form(fam, grid, n));
            } catch (const InadmissibleRegime&) {
                // cross-product formulas do not cover this regime
            }
        }
        for (const auto& d : others) {
            result.max_discrepancy = std::max(result.max_discrepancy, max_discrepancy(primary, d));
        }
        const DualFamily& pw = others.front();
        for (std::size_t c = 1; c <= pw.arity(); ++c) {
            spectra.header.push_back("re_pw_phi" + std::to_string(c));
            spectra.header.push_back("im_pw_phi" + std::to_string(c));
        }
        for (std::size_t r = 0; r < spectra.rows.size(); ++r) {
            for (std::size_t c = 0; c < pw.arity(); ++c) {
                spectra.rows[r].push_back(pw.spectra[c][r].real());
                spectra.rows[r].push_back(pw.spectra[c][r].imag());
            }
        }
        result.cross_validated = true;
        out << "max_discrepancy=" << format_double(result.max_discrepancy) << "\n";
    }
    emit_table(spectra, out_path(o, stem + "_spectra.csv"));

    const auto [a, b] = parse_window(o.kernel_window);
    KernelOptions ko;
    ko.half_width = std::max(std::abs(a), std::abs(b)) + 1.0;
    ko.quadrature_nodes = o.M;
    const auto kernels = dual_kernels(primary, ko);
    emit_table(kernel_table(kernels, uniform_grid(a, b, o.kernel_step)), out_path(o, stem + "_kernels.csv"));
    out << "wrote " << stem << "_spectra.csv and " << stem << "_kernels.csv (" << primary.source << ")\n";
    return result;
}

inline int cmd_duals(const Options& o, std::ostream& out)
{
    const BandSpec spec = spec_from(o);
    const GeneratorFamily fam = family_from(o, spec);
    if (check_frame(fam, make_frequency_grid(spec, o.grid)).verdict == Verdict::NotFrame) {
        out << "verdict=NotFrame: no canonical dual\n";
        return kExitNotFrame;
    }
    const DualsOutput r = write_duals(fam, o, "duals", out);
    if (r.cross_validated && !(r.max_discrepancy < 1e-9)) {
        out << "cross-validation failed: discrepancy " << format_double(r.max_discrepancy) << " >= 1e-9\n";
        return kExitError;
    }
    return kExitOk;
}

inline ReconstructionReport run_reconstruction(const Options& o, const BandSpec& spec, Scheme scheme)
{
    const auto [a, b] = parse_window(o.window);
    ExperimentConfig cfg;
    cfg.scheme = scheme;
    cfg.omega = spec.omega;
    cfg.t_o = spec.t_o;
    cfg.K = o.K;
    cfg.window_lo = a;
    cfg.window_hi = b;
    cfg.step = o.step;
    cfg.grid_size = o.grid;
    cfg.quadrature_nodes = o.M;
    return run_experiment(cfg, TestSignal::by_name(o.signal, spec.omega));
}

inline int cmd_reconstruct(const Options& o, std::ostream& out, const std::string& name = "error_table.csv")
{
    if (!o.family_path.empty()) throw InvalidArgument("reconstruct runs builtin schemes only (--scheme)");
    if (o.scheme.empty()) throw InvalidArgument("--scheme is required");
    const BandSpec spec = spec_from(o);
    const ReconstructionReport r = run_reconstruction(o, spec, parse_scheme(o.scheme));
    emit_table(error_table(r), out_path(o, name));
    out << "max_abs_err=" << format_double(r.max_abs_error) << ", rms=" << format_double(r.rms_error) << "\n";
    return kExitOk;
}

inline int cmd_reproduce(Options o, std::ostream& out)
{
    const std::string& fig = o.figure;
    o.t_o.reset();
    o.family_path.clear();
    o.omega = 1.0;
    o.cross_validate = false;
    auto duals_for = [&](const std::string& scheme, const std::string& ratio, bool kernels_only) {
        o.scheme = scheme;
        o.h_ratio = ratio;
        const BandSpec spec = spec_from(o);
        write_duals(scheme_family(parse_scheme(scheme), spec), o, fig, out);
        out << (kernels_only ? "figure data: " + fig + "_kernels.csv\n" : "figure data: " + fig + "_spectra.csv\n");
        return kExitOk;
    };
    if (fig == "fig1") return duals_for("derivative2", "1", false);
    if (fig == "fig2") return duals_for("derivative2", "3/2", false);
    if (fig == "fig4") return duals_for("derivative3", "2/3", true);
    if (fig == "fig5") return duals_for("derivative3", "2/3", false);
    if (fig == "fig6") return duals_for("derivative3", "11/15", true);
    if (fig == "fig7") return duals_for("derivative3", "11/15", false);
    if (fig == "fig3") {
        const TestSignal f = TestSignal::sinc2(1.0);
        TableArtifact t;
        t.kind = TableKind::KernelTable;
        t.header = {"t", "f"};
        for (double x : uniform_grid(-20.0, 20.0, 0.05)) t.rows.push_back({x, f.value(x)});
        emit_table(t, out_path(o, "fig3_signal.csv"));
        out << "figure data: fig3_signal.csv\n";
        return kExitOk;
    }
    if (fig == "fig8" || fig == "fig9") {
        o.scheme = "derivative3";
        o.h_ratio = fig == "fig8" ? "2/3" : "11/15";
        o.signal = "sinc2";
        return cmd_reconstruct(o, out, fig + "_error.csv");
    }
    throw InvalidArgument("unknown figure '" + fig + "' (fig1 ... fig9)");
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Multi-channel frames of translates for band-limited functions"};
    app.require_subcommand(1);
    Options o;
    std::string h_ratio;
    double t_o = 0.0;

    auto common = [&](CLI::App* sub, bool needs_family) {
        sub->add_option("--omega", o.omega, "band edge omega")->check(CLI::PositiveNumber);
        sub->add_option("--t-o", t_o, "shift step t_o (h = 2 pi / t_o)");
        sub->add_option("--h-ratio", h_ratio, "h / omega, decimal or fraction such as 2/3");
        sub->add_option("--scheme", o.scheme, "hilbert | derivative2 | derivative3");
        if (needs_family) sub->add_option("--family", o.family_path, "custom family JSON");
        sub->add_option("--grid", o.grid, "fiber grid size")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--M", o.M, "trapezoid nodes for inverse transforms");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "frame / Riesz basis verdict and constants");
    common(analyze, true);
    analyze->add_flag("--refine", o.refine, "repeat on a grid four times finer and compare verdicts");

    CLI::App* duals = app.add_subcommand("duals", "dual spectra and time kernels");
    common(duals, true);
    duals->add_flag("--cross-validate", o.cross_validate, "compare against the pointwise and cross-product routes");
    duals->add_option("--kernel-window", o.kernel_window, "time range a:b of the kernel table");
    duals->add_option("--kernel-step", o.kernel_step, "time step of the kernel table");

    CLI::App* recon = app.add_subcommand("reconstruct", "sample a test signal and reconstruct it");
    common(recon, false);
    recon->add_option("--K", o.K, "truncation |k| <= K")->check(CLI::PositiveNumber);
    recon->add_option("--window", o.window, "evaluation window a:b");
    recon->add_option("--step", o.step, "evaluation step");
    recon->add_option("--signal", o.signal, "sinc2 | zero");

    CLI::App* repro = app.add_subcommand("reproduce", "data behind the figures");
    repro->add_option("figure", o.figure, "fig1 ... fig9")->required();
    repro->add_option("--out", o.out, "output directory");
    repro->add_option("--K", o.K, "truncation for fig8 / fig9");
    repro->add_option("--M", o.M, "trapezoid nodes for inverse transforms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        CLI::App* used = app.get_subcommands().front();
        if (used != repro && used->count("--t-o")) o.t_o = t_o;
        if (used != repro && used->count("--h-ratio")) o.h_ratio = h_ratio;
        if (used == analyze) return cmd_analyze(o, out);
        if (used == duals) return cmd_duals(o, out);
        if (used == recon) return cmd_reconstruct(o, out);
        return cmd_reproduce(o, out);
    } catch (const NotFrame& e) {
        err << "error: " << e.what() << "\n";
        return kExitNotFrame;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace bandframe::cli
