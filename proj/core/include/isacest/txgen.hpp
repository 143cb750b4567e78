// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/grid.hpp"
#include "isacest/types.hpp"

#include <cstdint>
#include <vector>

namespace isacest {

/// Square QAM alphabet. Points are always normalized to unit average power.
struct ModulationConfig {
    int qam_order = 256;

    void validate() const;
};

/// Gray-mapped square QAM with unit average power. Point s has in-phase
/// Gray index s >> (log2(M)/2) and quadrature Gray index s & (sqrt(M)-1).
std::vector<cplx> make_constellation(const ModulationConfig& config);

/// Transmit grid X = eta * X_data + beta * X_pilot.
struct Frame {
    CMat grid;
    AllocationMask mask;
    double eta = 0.0;
    double beta = 0.0;
};

/// Data elements are i.i.d. uniform constellation points scaled by eta,
/// drawn from `seed`. Pilots are unit-modulus QPSK scaled by beta; their
/// sequence depends only on the mask seed, never on `seed`.
Frame generate_frame(const AllocationMask& mask, const ModulationConfig& modulation,
                     double eta, double beta, std::uint64_t seed);

}  // namespace isacest
