#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bb84mc/bb84.hpp"
#include "bb84mc/dtmc.hpp"
#include "bb84mc/oracle.hpp"
#include "bb84mc/parser.hpp"
#include "bb84mc/solver.hpp"
#include "bb84mc/validate.hpp"

namespace bb84mc {

/// Largest |checked - oracle| accepted by an oracle-checked run.
inline constexpr double kOracleTolerance = 1e-9;

struct PhotonRange {
    int first = 1;
    int last = 1;
    int step = 1;

    std::vector<int> values() const {
        std::vector<int> out;
        for (int n = first; n <= last; n += step) out.push_back(n);
        return out;
    }
};

/// Parses `A..B` or `A..B:STEP`.
inline PhotonRange parse_range(std::string_view text) {
    auto bad = [&] { return ModelError(ErrorKind::InvalidParameter, "malformed photon range '" + std::string(text) + "'"); };
    auto number = [&](std::string_view part) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) throw bad();
        return v;
    };
    PhotonRange r;
    auto dots = text.find("..");
    if (dots == std::string_view::npos) throw bad();
    r.first = number(text.substr(0, dots));
    std::string_view rest = text.substr(dots + 2);
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
        r.step = number(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    r.last = number(rest);
    if (r.first < 1) throw ModelError(ErrorKind::InvalidParameter, "photon range must start at 1 or more");
    if (r.last < r.first) throw ModelError(ErrorKind::InvalidParameter, "photon range '" + std::string(text) + "' is empty");
    if (r.step < 1) throw ModelError(ErrorKind::InvalidParameter, "photon range step must be positive");
    return r;
}

struct SweepSpec {
    PhotonRange photons;
    Bb84Params params;  // photons field ignored
    bool oracle_check = false;
    SolveOptions solver;
    unsigned jobs = 0;  // 0: hardware concurrency
};

struct ResultRow {
    int n = 0;
    double p_checked = 0.0;
    double p_oracle = 0.0;
    double abs_err = 0.0;
    std::size_t iterations = 0;
    double wall_ms = 0.0;
};

/// Generates, parses, validates, builds and checks one BB84 model, and
/// evaluates the closed form next to it.
inline ResultRow analyze(const Bb84Params& params, const SolveOptions& solver = {}) {
    auto start = std::chrono::steady_clock::now();
    Dtmc dtmc = build(validate(parse(generate(params))));
    PropertyQuery query = parse_property("P=? [ F \"detected\" ]");
    SolveReport report = prob_until(dtmc, query, solver);
    auto stop = std::chrono::steady_clock::now();

    ResultRow row;
    row.n = params.photons;
    row.p_checked = report.probability;
    row.p_oracle = detect_prob(params.photons, per_photon_detect_prob(params));
    row.abs_err = std::abs(row.p_checked - row.p_oracle);
    row.iterations = report.iterations;
    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return row;
}

/// Runs every point of the sweep. Points are independent and run
/// concurrently; rows come back sorted by n.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    check_params(spec.params);
    std::vector<int> ns = spec.photons.values();
    unsigned jobs = spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());

    std::vector<ResultRow> rows(ns.size());
    for (std::size_t begin = 0; begin < ns.size(); begin += jobs) {
        std::size_t end = std::min(ns.size(), begin + jobs);
        std::vector<std::future<ResultRow>> pending;
        for (std::size_t k = begin; k < end; ++k) {
            Bb84Params p = spec.params;
            p.photons = ns[k];
            pending.push_back(std::async(std::launch::async, [p, &spec] { return analyze(p, spec.solver); }));
        }
        for (std::size_t k = begin; k < end; ++k) {
            try {
                rows[k] = pending[k - begin].get();
            } catch (const ModelError& e) {
                throw ModelError(e.kind(), e.pos(), "at n=" + std::to_string(ns[k]) + ": " + e.detail());
            }
        }
    }
    return rows;
}

inline double max_abs_error(const std::vector<ResultRow>& rows) {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.abs_err);
    return worst;
}

/// 12 significant digits, trailing zeros kept.
inline std::string format_probability(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.12g", p);
    return buf;
}

inline constexpr std::string_view kCsvHeader = "n,p_checked,p_oracle,abs_err,iterations,wall_ms";

/// Writes the sweep CSV. With `timing` off the wall_ms column is written as
/// 0 so identical inputs produce identical bytes.
inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool timing = true,
                      std::string_view comment = {}) {
    if (!comment.empty()) out << "# " << comment << "\n";
    out << kCsvHeader << "\n";
    for (const auto& r : rows) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.3f", timing ? r.wall_ms : 0.0);
        out << r.n << "," << format_probability(r.p_checked) << "," << format_probability(r.p_oracle) << ","
            << format_probability(r.abs_err) << "," << r.iterations << "," << (timing ? wall : "0") << "\n";
    }
}

struct FigureCurve {
    std::string name;
    std::string description;
    Bb84Params params;
};

struct FigureSpec {
    std::string name;
    PhotonRange photons;
    std::vector<FigureCurve> curves;  // expected in increasing order pointwise
};

/// fig1: q = 1 with a perfect, a slightly noisy (0.7/0.1/0.1/0.1) and a
/// very noisy (0.4/0.2/0.2/0.2) channel, n = 5..50.
/// fig2: perfect channel with Eve intercepting 20%, 50% and 100% of the
/// photons, n = 5..70.
inline FigureSpec figure_spec(std::string_view name) {
    FigureSpec fig;
    fig.name = std::string(name);
    Bb84Params base;
    if (name == "fig1") {
        fig.photons = {5, 50, 1};
        const ChannelNoise channels[] = {{1.0, 0.0, 0.0, 0.0}, {0.7, 0.1, 0.1, 0.1}, {0.4, 0.2, 0.2, 0.2}};
        const char* labels[] = {"perfect channel", "noisy channel", "very noisy channel"};
        for (int k = 0; k < 3; ++k) {
            Bb84Params p = base;
            p.channel = channels[k];
            p.eve_q = 1.0;
            fig.curves.push_back({"ch" + std::to_string(k), labels[k], p});
        }
    } else if (name == "fig2") {
        fig.photons = {5, 70, 1};
        const double powers[] = {0.2, 0.5, 1.0};
        const char* labels[] = {"weak attack", "medium attack", "full attack"};
        for (int k = 0; k < 3; ++k) {
            Bb84Params p = base;
            p.eve_q = powers[k];
            fig.curves.push_back({"eve" + std::to_string(k), labels[k], p});
        }
    } else {
        throw ModelError(ErrorKind::InvalidParameter, "unknown figure '" + std::string(name) + "' (fig1 or fig2)");
    }
    return fig;
}

struct FigureResult {
    FigureSpec spec;
    std::vector<std::vector<ResultRow>> curves;
    std::vector<std::string> violations;  // ordering, monotonicity or oracle failures
    bool ordering_holds = true;
    std::size_t ties = 0;  // points ordered but not strictly
    std::string report;
};

inline FigureResult run_figure(std::string_view name, bool oracle_check, unsigned jobs = 0) {
    FigureResult result;
    result.spec = figure_spec(name);
    for (const auto& curve : result.spec.curves) {
        SweepSpec sweep;
        sweep.photons = result.spec.photons;
        sweep.params = curve.params;
        sweep.oracle_check = oracle_check;
        sweep.jobs = jobs;
        result.curves.push_back(run_sweep(sweep));
    }

    const auto& curves = result.curves;
    const std::size_t points = curves.front().size();
    for (std::size_t k = 0; k < points; ++k) {
        for (std::size_t c = 0; c + 1 < curves.size(); ++c) {
            double lo = curves[c][k].p_checked;
            double hi = curves[c + 1][k].p_checked;
            if (lo > hi) {
                result.ordering_holds = false;
                result.violations.push_back("ordering " + result.spec.curves[c].name + " <= " +
                                            result.spec.curves[c + 1].name + " fails at n=" +
                                            std::to_string(curves[c][k].n));
            } else if (lo == hi) {
                ++result.ties;
            }
        }
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        for (std::size_t k = 0; k + 1 < points; ++k) {
            if (!(curves[c][k].p_checked < curves[c][k + 1].p_checked)) {
                result.violations.push_back(result.spec.curves[c].name + " does not increase from n=" +
                                            std::to_string(curves[c][k].n));
            }
        }
        if (oracle_check && max_abs_error(curves[c]) > kOracleTolerance) {
            result.violations.push_back(result.spec.curves[c].name + " deviates from the closed form by " +
                                        format_probability(max_abs_error(curves[c])));
        }
    }

    std::string& rep = result.report;
    rep += result.spec.name + ": n=" + std::to_string(result.spec.photons.first) + ".." +
           std::to_string(result.spec.photons.last) + "\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& spec = result.spec.curves[c];
        rep += "  " + spec.name + " (" + spec.description + ", channel=" + format_real(spec.params.channel.keep) + "," +
               format_real(spec.params.channel.flip_basis) + "," + format_real(spec.params.channel.flip_bit) + "," +
               format_real(spec.params.channel.flip_both) + " q=" + format_real(spec.params.eve_q) +
               "): p1=" + format_probability(per_photon_detect_prob(spec.params)) +
               " first=" + format_probability(curves[c].front().p_checked) +
               " last=" + format_probability(curves[c].back().p_checked) +
               " max_abs_err=" + format_probability(max_abs_error(curves[c])) + "\n";
    }
    rep += "  pointwise ordering " + result.spec.curves.front().name;
    for (std::size_t c = 1; c < curves.size(); ++c) rep += " <= " + result.spec.curves[c].name;
    rep += ": " + std::string(result.ordering_holds ? "holds" : "VIOLATED") + " (" + std::to_string(result.ties) +
           " ties)\n";
    for (const auto& v : result.violations) rep += "  violation: " + v + "\n";
    return result;
}

}  // namespace bb84mc
