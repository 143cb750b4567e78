// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/channel.hpp"
#include "isacest/estimator.hpp"
#include "isacest/txgen.hpp"
#include "isacest/types.hpp"

namespace isacest {

/// Divisors with magnitude below this are treated as empty elements.
inline constexpr double kZfGuard = 1e-12;

struct ZfChannel {
    CMat grid;
    /// Used elements zeroed because |x_hat| < kZfGuard.
    int n_guarded = 0;
};

/// y / x_hat on the used set, zero-filled elsewhere.
ZfChannel zf_channel(const Observation& obs);

/// conj(x_hat) * y on the used set, zero-filled elsewhere.
CMat mf_channel(const Observation& obs);

/// Complex surface sampled on delay and Doppler coordinates.
/// values(i, j) belongs to (taus[i], alphas[j]).
struct Surface {
    RVec taus;
    RVec alphas;
    CMat values;
};

/// 2-D DFT of a zero-filled channel grid with zero padding by `oversampling`
/// along both axes. Frequency is transformed with exp(+j2pi k tau), time with
/// exp(-j2pi n alpha), so a path with parameters (tau, alpha) peaks at its own
/// coordinates. Coordinates follow delay_grid / doppler_grid.
Surface dft_spreading(const CMat& channel_grid, int oversampling = 1);

/// Real-valued counterpart of Surface.
struct MagnitudeSurface {
    RVec taus;
    RVec alphas;
    RMat values;
};

/// |sum_U |x_u|^2 exp(j2pi(t_u alpha - f_u tau))| normalized to 1 at the origin,
/// on delay_grid(os * N_F) x doppler_grid(os * N_T).
MagnitudeSurface ambiguity_function(const Frame& frame, int oversampling);

/// Successive-cancellation pipeline on the zero-forcing channel estimate with
/// an all-ones transmit estimate (the non-weighted device model).
EstimationReport unweighted_estimate(const Observation& obs, const EstimatorConfig& cfg);

/// Radar-style estimate: the `n_paths` largest local maxima of the magnitude of
/// a DFT spreading surface.
PathSet dft_peak_estimate(const CMat& channel_grid, int n_paths, int oversampling);

}  // namespace isacest
