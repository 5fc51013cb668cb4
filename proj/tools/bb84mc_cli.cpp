#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bb84mc/bb84mc.hpp"

namespace {

using namespace bb84mc;

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kModelError = 2,
    kSolverFailure = 3,
    kAcceptanceViolation = 4,
};

int exit_code_for(const ModelError& e) {
    switch (e.kind()) {
        case ErrorKind::InvalidParameter: return kUsage;
        case ErrorKind::NoConvergence: return kSolverFailure;
        default: return kModelError;
    }
}

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

ChannelNoise parse_channel(const std::string& text) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(start, comma - start);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ModelError(ErrorKind::InvalidParameter, "malformed channel component '" + item + "'");
        }
        parts.push_back(v);
        start = comma + 1;
    }
    if (parts.size() != 4) {
        throw ModelError(ErrorKind::InvalidParameter, "--channel needs four comma-separated probabilities p00,p10,p01,p11");
    }
    return {parts[0], parts[1], parts[2], parts[3]};
}

struct ParamFlags {
    std::string channel = "1,0,0,0";
    double eve_q = 1.0;
    double bias = 0.5;
    std::string passthrough = "channel";

    void attach(CLI::App* cmd) {
        cmd->add_option("--channel", channel, "Channel noise p00,p10,p01,p11 (keep, flip basis, flip bit, flip both)")
            ->capture_default_str();
        cmd->add_option("--eve-q", eve_q, "Probability that Eve intercepts a photon")->capture_default_str();
        cmd->add_option("--bias", bias, "Probability that Alice's data bit is 1")->capture_default_str();
        cmd->add_option("--passthrough", passthrough, "What a non-intercepted photon carries: channel|source")
            ->check(CLI::IsMember({"channel", "source"}))
            ->capture_default_str();
    }

    Bb84Params params(int photons) const {
        Bb84Params p;
        p.photons = photons;
        p.channel = parse_channel(channel);
        p.eve_q = eve_q;
        p.bias = bias;
        p.passthrough = passthrough == "source" ? Passthrough::SourceValues : Passthrough::ChannelOutput;
        check_params(p);
        return p;
    }
};

int cmd_check(const std::string& model_path, const std::string& prop, double tol, std::size_t max_iter,
              const std::string& export_path) {
    Dtmc dtmc = build(validate(parse(read_file(model_path))));
    PropertyQuery query = parse_property(prop, dtmc);
    SolveOptions options;
    options.tolerance = tol;
    options.max_iterations = max_iter;
    SolveReport report = prob_until(dtmc, query, options);
    if (!export_path.empty()) {
        auto out = open_output(export_path);
        export_text(dtmc, out);
    }
    std::cout << format_probability(report.probability) << "\n";
    std::cout << "states=" << dtmc.state_count() << " transitions=" << dtmc.transition_count()
              << " deadlocks=" << dtmc.deadlocks().size() << " iterations=" << report.iterations
              << " residual=" << report.residual << " prob0=" << report.prob0_count << " prob1=" << report.prob1_count
              << "\n";
    return kOk;
}

int cmd_bb84(const Bb84Params& params, const std::string& emit_path) {
    std::string text = generate(params);
    {
        auto out = open_output(emit_path);
        out << text;
    }
    std::cout << "wrote " << emit_path << "\n"
              << "variables: al_bas al_bit i (Alice); phase ch_bas ch_bit (Channel); eve_bas eve_bit (Eve); "
                 "bob_bas bob_bit detected (Bob)\n"
              << "phases: 0 choose, 1 aliceput, 2 evemeasure, 3 eveput, 4 bobmeasure, 5 compare\n"
              << "labels: \"detected\" = " << detected_event_definition(params) << "; \"done\"\n"
              << "per-photon detection probability " << format_probability(per_photon_detect_prob(params)) << "\n";
    return kOk;
}

int cmd_sweep(const SweepSpec& spec, const std::string& out_path, bool timing) {
    std::vector<ResultRow> rows = run_sweep(spec);
    {
        auto out = open_output(out_path);
        write_csv(rows, out, timing);
    }
    double worst = max_abs_error(rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << " (max abs_err " << format_probability(worst)
              << ")\n";
    if (spec.oracle_check && worst > kOracleTolerance) {
        for (const auto& r : rows) {
            if (r.abs_err > kOracleTolerance) {
                std::cerr << "oracle mismatch at n=" << r.n << ": checked " << format_probability(r.p_checked)
                          << " vs closed form " << format_probability(r.p_oracle) << "\n";
            }
        }
        return kAcceptanceViolation;
    }
    return kOk;
}

int cmd_figure(const std::string& name, const std::string& out_dir, bool oracle_check, bool timing) {
    FigureResult fig = run_figure(name, oracle_check);
    std::filesystem::create_directories(out_dir);
    for (std::size_t c = 0; c < fig.curves.size(); ++c) {
        const auto& curve = fig.spec.curves[c];
        auto out = open_output(std::filesystem::path(out_dir) / (fig.spec.name + "_" + curve.name + ".csv"));
        write_csv(fig.curves[c], out, timing, fig.spec.name + " " + curve.name + ": " + curve.description);
    }
    {
        auto out = open_output(std::filesystem::path(out_dir) / (fig.spec.name + "_report.txt"));
        out << fig.report;
    }
    std::cout << fig.report;
    return fig.violations.empty() ? kOk : kAcceptanceViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic model checking of BB84 eavesdropping detection"};
    app.require_subcommand(1);

    std::string model_path, prop, export_path;
    double tol = 1e-12;
    std::size_t max_iter = 1'000'000;
    auto* check = app.add_subcommand("check", "Check a PCTL reachability property on a model file");
    check->add_option("--model", model_path, "Model file")->required();
    check->add_option("--prop", prop, "Property, e.g. P=? [ F \"detected\" ]")->required();
    check->add_option("--tol", tol, "Gauss-Seidel convergence tolerance")->capture_default_str();
    check->add_option("--max-iter", max_iter, "Maximum number of sweeps")->capture_default_str();
    check->add_option("--export", export_path, "Write the built chain as text for debugging");

    int photons = 1;
    std::string emit_path;
    ParamFlags bb84_flags;
    auto* bb84 = app.add_subcommand("bb84", "Generate a BB84 intercept-resend model");
    bb84->add_option("--photons", photons, "Number of photons")->required();
    bb84_flags.attach(bb84);
    bb84->add_option("--emit", emit_path, "Output model file")->required();

    std::string range_text, out_path;
    bool oracle_check = false;
    bool no_timing = false;
    unsigned jobs = 0;
    ParamFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Check the detection probability over a range of photon counts");
    sweep->add_option("--photons", range_text, "Photon range A..B[:STEP]")->required();
    sweep_flags.attach(sweep);
    sweep->add_flag("--oracle-check", oracle_check, "Fail unless every point matches the closed form within 1e-9");
    sweep->add_flag("--no-timing", no_timing, "Write 0 in the wall_ms column");
    sweep->add_option("--jobs", jobs, "Concurrent points (0 = hardware threads)");
    sweep->add_option("--out", out_path, "Output CSV")->required();

    std::string fig_name, fig_dir;
    bool fig_oracle = false;
    bool fig_no_timing = false;
    auto* figure = app.add_subcommand("figure", "Reproduce the channel-noise (fig1) or Eve-power (fig2) curves");
    figure->add_option("--name", fig_name, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
    figure->add_option("--out", fig_dir, "Output directory")->required();
    figure->add_flag("--oracle-check", fig_oracle, "Also fail if any point deviates from the closed form");
    figure->add_flag("--no-timing", fig_no_timing, "Write 0 in the wall_ms column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*check) return cmd_check(model_path, prop, tol, max_iter, export_path);
        if (*bb84) return cmd_bb84(bb84_flags.params(photons), emit_path);
        if (*sweep) {
            SweepSpec spec;
            spec.photons = parse_range(range_text);
            spec.params = sweep_flags.params(spec.photons.first);
            spec.oracle_check = oracle_check;
            spec.jobs = jobs;
            return cmd_sweep(spec, out_path, !no_timing);
        }
        if (*figure) return cmd_figure(fig_name, fig_dir, fig_oracle, !fig_no_timing);
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kModelError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kModelError;
    }
    return kUsage;
}
