// SPDX-License-Identifier: Apache-2.0
#include "isacest/model.hpp"

#include <cmath>
#include <string>

namespace isacest {

SamplingAxes SamplingAxes::for_grid(int n_subcarriers, int n_symbols) {
    SamplingAxes axes;
    axes.f = RVec::LinSpaced(n_subcarriers, 0.0, n_subcarriers - 1.0);
    axes.t = RVec::LinSpaced(n_symbols, 0.0, n_symbols - 1.0);
    return axes;
}

CMat steering_full(double tau, double alpha, const SamplingAxes& axes) {
    CVec freq_part(axes.f.size());
    for (Eigen::Index k = 0; k < axes.f.size(); ++k) freq_part[k] = std::polar(1.0, -kTwoPi * axes.f[k] * tau);
    CVec time_part(axes.t.size());
    for (Eigen::Index n = 0; n < axes.t.size(); ++n) time_part[n] = std::polar(1.0, kTwoPi * axes.t[n] * alpha);
    return freq_part * time_part.transpose();
}

DeviceModel::DeviceModel(const AllocationMask& mask)
    : DeviceModel(mask, SamplingAxes::for_grid(mask.n_subcarriers(), mask.n_symbols())) {}

DeviceModel::DeviceModel(const AllocationMask& mask, const SamplingAxes& axes)
    : n_subcarriers_(mask.n_subcarriers()), n_symbols_(mask.n_symbols()), axes_(axes) {
    if (axes.f.size() != mask.n_subcarriers() || axes.t.size() != mask.n_symbols()) {
        throw DimensionError("sampling axes do not match the mask dimensions");
    }
    const auto& used = mask.all_used();
    const auto n = static_cast<Eigen::Index>(used.size());
    freq_.resize(n);
    time_.resize(n);
    symbol_.resize(used.size());
    subcarrier_.resize(used.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        freq_[i] = axes.f[used[i].subcarrier];
        time_[i] = axes.t[used[i].symbol];
        symbol_[i] = used[i].symbol;
        subcarrier_[i] = used[i].subcarrier;
    }
}

CVec DeviceModel::steering(double tau, double alpha) const {
    CVec a(n_used());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] = std::polar(1.0, kTwoPi * (time_[i] * alpha - freq_[i] * tau));
    }
    return a;
}

CVec DeviceModel::channel(const PathSet& paths) const {
    paths.check_lengths();
    CVec h = CVec::Zero(n_used());
    for (int p = 0; p < paths.size(); ++p) h += paths.gammas[p] * steering(paths.taus[p], paths.alphas[p]);
    return h;
}

CVec DeviceModel::signal(const PathSet& paths, const CVec& x_hat) const {
    if (x_hat.size() != n_used()) {
        throw DimensionError("x_hat has " + std::to_string(x_hat.size()) + " entries, expected " +
                             std::to_string(n_used()));
    }
    return x_hat.cwiseProduct(channel(paths));
}

CMat DeviceModel::jacobian(const PathSet& paths, const CVec& x_hat) const {
    paths.check_lengths();
    if (x_hat.size() != n_used()) throw DimensionError("x_hat length does not match the mask");
    const int np = paths.size();
    const cplx j(0.0, 1.0);
    CMat jac(n_used(), 4 * np);
    for (int p = 0; p < np; ++p) {
        const CVec weighted = x_hat.cwiseProduct(steering(paths.taus[p], paths.alphas[p]));
        const cplx g = paths.gammas[p];
        for (Eigen::Index i = 0; i < n_used(); ++i) {
            jac(i, p) = g * (-j * kTwoPi * freq_[i]) * weighted[i];
            jac(i, np + p) = g * (j * kTwoPi * time_[i]) * weighted[i];
        }
        jac.col(2 * np + p) = weighted;
        jac.col(3 * np + p) = j * weighted;
    }
    return jac;
}

CMat DeviceModel::correlate_grid(const CVec& weights, const RVec& taus, const RVec& alphas) const {
    if (weights.size() != n_used()) throw DimensionError("weights length does not match the mask");

    CMat freq_phase(axes_.f.size(), taus.size());
    for (Eigen::Index k = 0; k < axes_.f.size(); ++k) {
        for (Eigen::Index i = 0; i < taus.size(); ++i) freq_phase(k, i) = std::polar(1.0, kTwoPi * axes_.f[k] * taus[i]);
    }
    CMat time_phase(axes_.t.size(), alphas.size());
    for (Eigen::Index n = 0; n < axes_.t.size(); ++n) {
        for (Eigen::Index a = 0; a < alphas.size(); ++a) time_phase(n, a) = std::polar(1.0, -kTwoPi * axes_.t[n] * alphas[a]);
    }

    CMat per_symbol = CMat::Zero(axes_.t.size(), taus.size());
    for (Eigen::Index u = 0; u < n_used(); ++u) {
        per_symbol.row(symbol_[u]) += weights[u] * freq_phase.row(subcarrier_[u]);
    }
    return per_symbol.transpose() * time_phase;
}

CVec steering(double tau, double alpha, const AllocationMask& mask, const SamplingAxes& axes) {
    return DeviceModel(mask, axes).steering(tau, alpha);
}

CVec synth_channel(const PathSet& paths, const AllocationMask& mask, const SamplingAxes& axes) {
    return DeviceModel(mask, axes).channel(paths);
}

CVec signal_model(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
                  const SamplingAxes& axes) {
    return DeviceModel(mask, axes).signal(paths, x_hat);
}

CMat jacobian(const PathSet& paths, const CVec& x_hat, const AllocationMask& mask,
              const SamplingAxes& axes) {
    return DeviceModel(mask, axes).jacobian(paths, x_hat);
}

RVec delay_grid(int points) {
    RVec taus(points);
    for (int i = 0; i < points; ++i) taus[i] = static_cast<double>(i + 1) / points;
    return taus;
}

RVec doppler_grid(int points) {
    RVec alphas(points);
    const int offset = (points + 1) / 2;
    for (int j = 0; j < points; ++j) alphas[j] = static_cast<double>(j + 1 - offset) / points;
    return alphas;
}

}  // namespace isacest
