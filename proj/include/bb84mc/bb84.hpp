#pragma once

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "bb84mc/diagnostics.hpp"
#include "bb84mc/printer.hpp"

namespace bb84mc {

/// What the channel forwards to Bob for a photon Eve does not intercept.
enum class Passthrough {
    ChannelOutput,  // the (possibly perturbed) photon already on the channel
    SourceValues,   // Alice's original basis and bit
};

inline std::string_view to_string(Passthrough mode) {
    return mode == Passthrough::ChannelOutput ? "channel" : "source";
}

/// Per-photon channel perturbation. Basis 0 is rectilinear, 1 diagonal.
struct ChannelNoise {
    double keep = 1.0;        // p00: photon unchanged
    double flip_basis = 0.0;  // p10: basis flipped, bit kept
    double flip_bit = 0.0;    // p01: bit flipped, basis kept
    double flip_both = 0.0;   // p11: both flipped

    double sum() const { return keep + flip_basis + flip_bit + flip_both; }
};

struct Bb84Params {
    int photons = 1;
    ChannelNoise channel;
    double eve_q = 1.0;  // probability Eve intercepts a photon
    double bias = 0.5;   // probability Alice's data bit is 1
    Passthrough passthrough = Passthrough::ChannelOutput;
};

inline constexpr double kChannelSumTolerance = 1e-12;

inline void check_params(const Bb84Params& p) {
    auto is_probability = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (p.photons < 1) {
        throw ModelError(ErrorKind::InvalidParameter, "photon count must be at least 1, got " + std::to_string(p.photons));
    }
    const double components[] = {p.channel.keep, p.channel.flip_basis, p.channel.flip_bit, p.channel.flip_both};
    for (double c : components) {
        if (!is_probability(c)) {
            throw ModelError(ErrorKind::InvalidParameter, "channel probability " + format_real(c) + " is outside [0,1]");
        }
    }
    if (std::abs(p.channel.sum() - 1.0) > kChannelSumTolerance) {
        throw ModelError(ErrorKind::InvalidParameter,
                         "channel probabilities sum to " + format_real(p.channel.sum()) + ", not 1");
    }
    if (!is_probability(p.eve_q)) {
        throw ModelError(ErrorKind::InvalidParameter, "interception probability " + format_real(p.eve_q) +
                                                          " is outside [0,1]");
    }
    if (!is_probability(p.bias)) {
        throw ModelError(ErrorKind::InvalidParameter, "bit bias " + format_real(p.bias) + " is outside [0,1]");
    }
}

/// Boolean expression, over the generated model's variables, that holds
/// once Bob has used Alice's basis yet read the wrong bit.
inline std::string detected_event_definition(const Bb84Params& = {}) { return "detected=1"; }

/// The per-round mismatch test evaluated in the compare phase.
inline constexpr std::string_view kMismatch = "bob_bas=al_bas & bob_bit!=al_bit";

/// Writes the intercept-resend model for `params` to `out`.
///
/// One photon round walks the Channel module's `phase` variable through
///   0 choose      Alice draws basis (uniform) and bit (1 w.p. bias)
///   1 aliceput    channel loads Alice's photon, perturbed by the noise vector
///   2 evemeasure  Eve measures the channel photon in a random basis
///   3 eveput      with probability q the channel carries Eve's resent photon
///   4 bobmeasure  Bob measures in a random basis
///   5 compare     basis match with bit mismatch sets detected (absorbing);
///                 otherwise the next photon starts at phase 0, or the run
///                 ends (absorbing) after the last photon
/// Measuring in the photon's basis returns its bit; the other basis gives
/// a fair coin. Per-photon variables are reset between rounds so rounds
/// are independent and the state space grows linearly in the photon count.
inline void generate(const Bb84Params& params, std::ostream& out) {
    check_params(params);
    const std::string n = std::to_string(params.photons);
    const char* forward = params.passthrough == Passthrough::ChannelOutput
                              ? "(phase'=4)"
                              : "(phase'=4) & (ch_bas'=al_bas) & (ch_bit'=al_bit)";

    out << "// BB84 intercept-resend, photons=" << n << " channel=" << format_real(params.channel.keep) << ","
        << format_real(params.channel.flip_basis) << "," << format_real(params.channel.flip_bit) << ","
        << format_real(params.channel.flip_both) << " eve_q=" << format_real(params.eve_q)
        << " bias=" << format_real(params.bias) << " passthrough=" << to_string(params.passthrough) << "\n"
        << "dtmc\n"
        << "\n"
        << "const int photons = " << n << ";\n"
        << "const double bias = " << format_real(params.bias) << ";\n"
        << "const double p_keep = " << format_real(params.channel.keep) << ";\n"
        << "const double p_flip_bas = " << format_real(params.channel.flip_basis) << ";\n"
        << "const double p_flip_bit = " << format_real(params.channel.flip_bit) << ";\n"
        << "const double p_flip_both = " << format_real(params.channel.flip_both) << ";\n"
        << "const double q = " << format_real(params.eve_q) << ";\n"
        << "\n"
        << "module Alice\n"
        << "  al_bas : [0..1] init 0;\n"
        << "  al_bit : [0..1] init 0;\n"
        << "  i : [1.." << n << "] init 1;\n"
        << "\n"
        << "  [choose] phase=0 -> (1-bias)/2 : (al_bas'=0) & (al_bit'=0)\n"
        << "      + bias/2 : (al_bas'=0) & (al_bit'=1)\n"
        << "      + (1-bias)/2 : (al_bas'=1) & (al_bit'=0)\n"
        << "      + bias/2 : (al_bas'=1) & (al_bit'=1);\n"
        << "  [next] i<photons -> (i'=i+1) & (al_bas'=0) & (al_bit'=0);\n"
        << "endmodule\n"
        << "\n"
        << "module Channel\n"
        << "  phase : [0..5] init 0;\n"
        << "  ch_bas : [0..1] init 0;\n"
        << "  ch_bit : [0..1] init 0;\n"
        << "\n"
        << "  [choose] phase=0 -> (phase'=1);\n"
        << "  [aliceput] phase=1 -> p_keep : (phase'=2) & (ch_bas'=al_bas) & (ch_bit'=al_bit)\n"
        << "      + p_flip_bas : (phase'=2) & (ch_bas'=1-al_bas) & (ch_bit'=al_bit)\n"
        << "      + p_flip_bit : (phase'=2) & (ch_bas'=al_bas) & (ch_bit'=1-al_bit)\n"
        << "      + p_flip_both : (phase'=2) & (ch_bas'=1-al_bas) & (ch_bit'=1-al_bit);\n"
        << "  [evemeasure] phase=2 -> (phase'=3);\n"
        << "  [eveput] phase=3 -> q : (phase'=4) & (ch_bas'=eve_bas) & (ch_bit'=eve_bit)\n"
        << "      + 1-q : " << forward << ";\n"
        << "  [bobmeasure] phase=4 -> (phase'=5);\n"
        << "  [next] phase=5 & !(" << kMismatch << ") -> (phase'=0) & (ch_bas'=0) & (ch_bit'=0);\n"
        << "endmodule\n"
        << "\n"
        << "module Eve\n"
        << "  eve_bas : [0..1] init 0;\n"
        << "  eve_bit : [0..1] init 0;\n"
        << "\n"
        << "  [evemeasure] phase=2 -> 0.5 : (eve_bas'=ch_bas) & (eve_bit'=ch_bit)\n"
        << "      + 0.25 : (eve_bas'=1-ch_bas) & (eve_bit'=0)\n"
        << "      + 0.25 : (eve_bas'=1-ch_bas) & (eve_bit'=1);\n"
        << "  [next] true -> (eve_bas'=0) & (eve_bit'=0);\n"
        << "endmodule\n"
        << "\n"
        << "module Bob\n"
        << "  bob_bas : [0..1] init 0;\n"
        << "  bob_bit : [0..1] init 0;\n"
        << "  detected : [0..1] init 0;\n"
        << "\n"
        << "  [bobmeasure] phase=4 -> 0.5 : (bob_bas'=ch_bas) & (bob_bit'=ch_bit)\n"
        << "      + 0.25 : (bob_bas'=1-ch_bas) & (bob_bit'=0)\n"
        << "      + 0.25 : (bob_bas'=1-ch_bas) & (bob_bit'=1);\n"
        << "  [] phase=5 & detected=0 & " << kMismatch << " -> (detected'=1);\n"
        << "  [next] true -> (bob_bas'=0) & (bob_bit'=0);\n"
        << "endmodule\n"
        << "\n"
        << "label \"detected\" = " << detected_event_definition(params) << ";\n"
        << "label \"done\" = phase=5 & i=photons & !(" << kMismatch << ");\n";
}

inline std::string generate(const Bb84Params& params) {
    std::ostringstream out;
    generate(params, out);
    return out.str();
}

}  // namespace bb84mc
