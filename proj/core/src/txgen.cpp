// SPDX-License-Identifier: Apache-2.0
#include "isacest/txgen.hpp"

#include "isacest/rng.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

namespace isacest {

void ModulationConfig::validate() const {
    if (qam_order != 4 && qam_order != 16 && qam_order != 64 && qam_order != 256) {
        throw ConfigError("unsupported QAM order " + std::to_string(qam_order) +
                          " (expected 4, 16, 64 or 256)");
    }
}

namespace {

unsigned gray_decode(unsigned g) {
    unsigned b = g;
    for (unsigned shift = 1; shift < 32; shift <<= 1) b ^= b >> shift;
    return b;
}

}  // namespace

std::vector<cplx> make_constellation(const ModulationConfig& config) {
    config.validate();
    const auto order = static_cast<unsigned>(config.qam_order);
    const int bits_per_axis = std::countr_zero(order) / 2;
    const unsigned side = 1U << bits_per_axis;
    // Mean power of the unnormalized odd-integer lattice is 2(M - 1)/3.
    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);

    std::vector<cplx> points;
    points.reserve(order);
    for (unsigned s = 0; s < order; ++s) {
        const unsigned i_level = gray_decode(s >> bits_per_axis);
        const unsigned q_level = gray_decode(s & (side - 1));
        const double i_amp = 2.0 * i_level - (side - 1.0);
        const double q_amp = 2.0 * q_level - (side - 1.0);
        points.emplace_back(i_amp * scale, q_amp * scale);
    }
    return points;
}

Frame generate_frame(const AllocationMask& mask, const ModulationConfig& modulation, double eta,
                     double beta, std::uint64_t seed) {
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta must be in [0, 1)");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0, 1)");
    const auto constellation = make_constellation(modulation);

    CMat grid = CMat::Zero(mask.n_subcarriers(), mask.n_symbols());

    std::mt19937_64 pilot_rng(derive_seed(mask.seed(), stream::kPilots, 0));
    std::uniform_int_distribution<int> qpsk(0, 3);
    const double r = 1.0 / std::sqrt(2.0);
    for (const auto& re : mask.pilots()) {
        const int q = qpsk(pilot_rng);
        const cplx symbol((q & 1) ? -r : r, (q & 2) ? -r : r);
        grid(re.subcarrier, re.symbol) = beta * symbol;
    }

    std::mt19937_64 data_rng(derive_seed(seed, stream::kPayload, 0));
    std::uniform_int_distribution<std::size_t> pick(0, constellation.size() - 1);
    for (const auto& re : mask.data()) grid(re.subcarrier, re.symbol) = eta * constellation[pick(data_rng)];

    return Frame{std::move(grid), mask, eta, beta};
}

}  // namespace isacest
