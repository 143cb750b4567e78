// SPDX-License-Identifier: Apache-2.0
#include "isacest/channel.hpp"

#include "isacest/model.hpp"
#include "isacest/rng.hpp"

#include <cmath>
#include <random>
#include <string>

namespace isacest {

void PathSet::push_back(double tau, double alpha, cplx gamma) {
    taus.push_back(tau);
    alphas.push_back(alpha);
    gammas.push_back(gamma);
}

void PathSet::check_lengths() const {
    if (taus.size() != alphas.size() || taus.size() != gammas.size()) {
        throw DimensionError("path set has mismatched lengths (" + std::to_string(taus.size()) + ", " +
                             std::to_string(alphas.size()) + ", " + std::to_string(gammas.size()) + ")");
    }
}

void PathSet::validate() const {
    check_lengths();
    for (std::size_t p = 0; p < taus.size(); ++p) {
        if (!(taus[p] > 0.0 && taus[p] <= 1.0)) {
            throw ConfigError("path " + std::to_string(p) + ": tau must be in (0, 1]");
        }
        if (!(alphas[p] > -0.5 && alphas[p] <= 0.5)) {
            throw ConfigError("path " + std::to_string(p) + ": alpha must be in (-0.5, 0.5]");
        }
        if (!std::isfinite(gammas[p].real()) || !std::isfinite(gammas[p].imag())) {
            throw ConfigError("path " + std::to_string(p) + ": gamma must be finite");
        }
    }
}

void Observation::validate() const {
    if (y.size() != mask.n_used() || x_hat.size() != mask.n_used()) {
        throw DimensionError("observation vectors must have one entry per used element");
    }
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw ConfigError("noise_var must be positive");
}

CMat propagate(const Frame& frame, const PathSet& paths) {
    paths.check_lengths();
    const DeviceModel model(frame.mask);
    const CVec h = model.channel(paths);
    return frame.grid.cwiseProduct(scatter(frame.mask, h));
}

Observation observe(const Frame& frame, const PathSet& paths, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db) || snr_db == -kNoiseless) throw ConfigError("snr_db must be finite");
    const CMat received = propagate(frame, paths);

    Observation obs{vectorize(frame.mask, received), vectorize(frame.mask, frame.grid), frame.mask, 1.0};
    const double n_used = static_cast<double>(frame.mask.n_used());
    const double signal_power = obs.y.squaredNorm() / n_used;

    if (snr_db == kNoiseless) {
        obs.noise_var = signal_power > 0.0 ? signal_power : 1.0;
        return obs;
    }
    if (!(signal_power > 0.0)) throw ConfigError("received signal has zero energy; SNR is undefined");

    obs.noise_var = signal_power / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(derive_seed(seed, stream::kNoise, 0));
    std::normal_distribution<double> normal(0.0, std::sqrt(obs.noise_var / 2.0));
    for (Eigen::Index i = 0; i < obs.y.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        obs.y[i] += cplx(re, im);
    }
    return obs;
}

}  // namespace isacest
