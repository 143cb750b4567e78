// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/grid.hpp"
#include "isacest/txgen.hpp"
#include "isacest/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace isacest {

/// Per-path delay, Doppler shift and complex weight. Shared by ground truth
/// and estimates.
struct PathSet {
    std::vector<double> taus;
    std::vector<double> alphas;
    std::vector<cplx> gammas;

    int size() const noexcept { return static_cast<int>(taus.size()); }
    bool empty() const noexcept { return taus.empty(); }

    void push_back(double tau, double alpha, cplx gamma);

    /// Lengths agree. Does not check the normalized windows.
    void check_lengths() const;

    /// Lengths agree and every tau is in (0, 1], every alpha in (-0.5, 0.5].
    void validate() const;
};

/// Vectorized received samples together with the transmit estimate that
/// produced them.
struct Observation {
    CVec y;
    CVec x_hat;
    AllocationMask mask;
    double noise_var = 1.0;

    void validate() const;
};

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Noiseless X .* H over the full grid (zero outside the used set).
CMat propagate(const Frame& frame, const PathSet& paths);

/// Adds circular complex Gaussian noise on the used elements with variance
/// chosen so that snr_db = 10 log10(mean_U |X.*H|^2 / sigma^2).
///
/// snr_db == kNoiseless disables the noise; noise_var is then recorded as
/// the mean received power (a nominal 0 dB reference) so that downstream
/// weighting stays finite. x_hat is the vectorized transmit grid.
Observation observe(const Frame& frame, const PathSet& paths, double snr_db, std::uint64_t seed);

}  // namespace isacest
