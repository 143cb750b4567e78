// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/channel.hpp"
#include "isacest/grid.hpp"
#include "isacest/types.hpp"

namespace isacest {

/// Normalized sampling positions of the full block. f[k] = k and t[n] = n,
/// so the delay is measured in units of the OFDM symbol length 1/delta_f and
/// the Doppler shift in units of 1/T_O. With these axes tau in (0, 1] and
/// alpha in (-0.5, 0.5] each cover exactly one unambiguous period, and one
/// resolution cell is 1/N_F in delay and 1/N_T in Doppler.
struct SamplingAxes {
    RVec f;
    RVec t;

    static SamplingAxes for_grid(int n_subcarriers, int n_symbols);
};

/// Steering array over the full grid: entry (k, n) = exp(-j2pi f_k tau) exp(j2pi t_n alpha).
CMat steering_full(double tau, double alpha, const SamplingAxes& axes);

/// Device model restricted to the used resource elements of one mask.
///
/// Holds the per-element frequency and time coordinates in canonical order,
/// so repeated evaluations do not touch the mask again. Cheap to copy.
class DeviceModel {
public:
    DeviceModel(const AllocationMask& mask, const SamplingAxes& axes);
    explicit DeviceModel(const AllocationMask& mask);

    int n_used() const noexcept { return static_cast<int>(freq_.size()); }
    int n_subcarriers() const noexcept { return n_subcarriers_; }
    int n_symbols() const noexcept { return n_symbols_; }

    /// Frequency coordinate of every used element.
    const RVec& freq() const noexcept { return freq_; }
    /// Time coordinate of every used element.
    const RVec& time() const noexcept { return time_; }
    /// Symbol index of every used element.
    const std::vector<int>& symbol_index() const noexcept { return symbol_; }
    /// Subcarrier index of every used element.
    const std::vector<int>& subcarrier_index() const noexcept { return subcarrier_; }
    const SamplingAxes& axes() const noexcept { return axes_; }

    /// a(tau, alpha) over the used set.
    CVec steering(double tau, double alpha) const;

    /// h = sum_p gamma_p a(tau_p, alpha_p).
    CVec channel(const PathSet& paths) const;

    /// s = x_hat .* h.
    CVec signal(const PathSet& paths, const CVec& x_hat) const;

    /// Derivatives of signal() with respect to the real parameter vector
    /// (tau_1..tau_P, alpha_1..alpha_P, Re gamma_1..Re gamma_P, Im gamma_1..Im gamma_P).
    CMat jacobian(const PathSet& paths, const CVec& x_hat) const;

    /// G(tau_i, alpha_j) = sum_u conj(a_u(tau_i, alpha_j)) w_u for every grid
    /// pair. Separable evaluation: per-symbol partial sums over subcarriers
    /// first, then the Doppler sum over symbols.
    CMat correlate_grid(const CVec& weights, const RVec& taus, const RVec& alphas) const;

private:
    int n_subcarriers_;
    int n_symbols_;
    SamplingAxes axes_;
    RVec freq_;
    RVec time_;
    std::vector<int> symbol_;
    std::vector<int> subcarrier_;
};

/// vectorize(steering_full) under the canonical order.
CVec steering(double tau, double alpha, const AllocationMask& mask, const SamplingAxes& axes);

CVec synth_channel(const PathSet& paths, const AllocationMask& mask, const SamplingAxes& axes);

/// Throws DimensionError if x_hat does not have one entry per used element.
CVec signal_model(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
                  const SamplingAxes& axes);

CMat jacobian(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
              const SamplingAxes& axes);

/// Regular grid of L delays covering (0, 1]: tau_i = (i + 1) / L.
RVec delay_grid(int points);

/// Regular grid of L Doppler shifts covering (-0.5, 0.5] on multiples of 1/L:
/// alpha_j = (j + 1 - ceil(L / 2)) / L.
RVec doppler_grid(int points);

}  // namespace isacest
