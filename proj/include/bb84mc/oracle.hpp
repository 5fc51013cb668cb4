#pragma once

#include <cmath>
#include <vector>

#include "bb84mc/bb84.hpp"

namespace bb84mc {

/// One leaf of the single-photon outcome tree.
struct PhotonOutcome {
    int al_bas, al_bit;
    int ch_bas, ch_bit;
    bool intercepted;
    int eve_bas, eve_bit;  // -1 when not intercepted
    int bob_bas, bob_bit;
    bool detected;
    double weight;
};

using PhotonOutcomeDistribution = std::vector<PhotonOutcome>;

/// Enumerates every outcome of one photon round, independently of the
/// model checker: Alice's basis and bit, the channel branch, the intercept
/// coin, Eve's basis and reading, Bob's basis and reading. Zero-weight
/// leaves are kept so the tree shape does not depend on the parameters.
inline PhotonOutcomeDistribution photon_outcomes(const ChannelNoise& channel, double q, double bias,
                                                 Passthrough passthrough) {
    Bb84Params check;
    check.channel = channel;
    check.eve_q = q;
    check.bias = bias;
    check.passthrough = passthrough;
    check_params(check);

    // P(reading = bit | photon (basis, value) measured in `measure_basis`)
    auto reading = [](int basis, int value, int measure_basis, int bit) {
        if (basis == measure_basis) return bit == value ? 1.0 : 0.0;
        return 0.5;
    };
    const double branch[2][2] = {{channel.keep, channel.flip_bit}, {channel.flip_basis, channel.flip_both}};

    PhotonOutcomeDistribution out;
    for (int al_bas = 0; al_bas < 2; ++al_bas) {
        for (int al_bit = 0; al_bit < 2; ++al_bit) {
            double w_alice = 0.5 * (al_bit ? bias : 1.0 - bias);
            for (int flip_bas = 0; flip_bas < 2; ++flip_bas) {
                for (int flip_bit = 0; flip_bit < 2; ++flip_bit) {
                    double w_channel = w_alice * branch[flip_bas][flip_bit];
                    int ch_bas = al_bas ^ flip_bas;
                    int ch_bit = al_bit ^ flip_bit;
                    for (int intercepted = 0; intercepted < 2; ++intercepted) {
                        double w_coin = w_channel * (intercepted ? q : 1.0 - q);
                        // (basis, value, weight) of what reaches Bob, per Eve branch
                        struct Sent {
                            int eve_bas, eve_bit, bas, bit;
                            double weight;
                        };
                        std::vector<Sent> sent;
                        if (intercepted) {
                            for (int eve_bas = 0; eve_bas < 2; ++eve_bas) {
                                for (int eve_bit = 0; eve_bit < 2; ++eve_bit) {
                                    double w = w_coin * 0.5 * reading(ch_bas, ch_bit, eve_bas, eve_bit);
                                    sent.push_back({eve_bas, eve_bit, eve_bas, eve_bit, w});
                                }
                            }
                        } else if (passthrough == Passthrough::ChannelOutput) {
                            sent.push_back({-1, -1, ch_bas, ch_bit, w_coin});
                        } else {
                            sent.push_back({-1, -1, al_bas, al_bit, w_coin});
                        }
                        for (const auto& s : sent) {
                            for (int bob_bas = 0; bob_bas < 2; ++bob_bas) {
                                for (int bob_bit = 0; bob_bit < 2; ++bob_bit) {
                                    double w = s.weight * 0.5 * reading(s.bas, s.bit, bob_bas, bob_bit);
                                    bool detected = bob_bas == al_bas && bob_bit != al_bit;
                                    out.push_back({al_bas, al_bit, ch_bas, ch_bit, intercepted != 0, s.eve_bas,
                                                   s.eve_bit, bob_bas, bob_bit, detected, w});
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

/// Probability that a single photon round triggers detection.
inline double per_photon_detect_prob(const ChannelNoise& channel, double q, double bias, Passthrough passthrough) {
    double p = 0.0;
    for (const auto& o : photon_outcomes(channel, q, bias, passthrough)) {
        if (o.detected) p += o.weight;
    }
    return p;
}

inline double per_photon_detect_prob(const Bb84Params& params) {
    return per_photon_detect_prob(params.channel, params.eve_q, params.bias, params.passthrough);
}

/// 1 - (1 - p1)^n: detection within n independent rounds.
inline double detect_prob(int n, double p1) {
    if (n <= 0) return 0.0;
    return 1.0 - std::pow(1.0 - p1, n);
}

}  // namespace bb84mc
