// SPDX-License-Identifier: Apache-2.0
#include "isacest/baselines.hpp"

#include "isacest/model.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <tuple>

namespace isacest {

ZfChannel zf_channel(const Observation& obs) {
    obs.validate();
    ZfChannel out{CMat::Zero(obs.mask.n_subcarriers(), obs.mask.n_symbols()), 0};
    const auto& used = obs.mask.all_used();
    for (std::size_t i = 0; i < used.size(); ++i) {
        const cplx x = obs.x_hat[i];
        if (std::abs(x) < kZfGuard) {
            ++out.n_guarded;
            continue;
        }
        out.grid(used[i].subcarrier, used[i].symbol) = obs.y[i] / x;
    }
    return out;
}

CMat mf_channel(const Observation& obs) {
    obs.validate();
    return scatter(obs.mask, obs.x_hat.conjugate().cwiseProduct(obs.y));
}

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Plan {
public:
    Plan(int n, int howmany, int stride, int dist, cplx* data, int sign) {
        auto* buf = reinterpret_cast<fftw_complex*>(data);
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist, sign,
                                   FFTW_ESTIMATE);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

}  // namespace

Surface dft_spreading(const CMat& channel_grid, int oversampling) {
    if (oversampling < 1) throw ConfigError("oversampling must be >= 1");
    const int lf = oversampling * static_cast<int>(channel_grid.rows());
    const int lt = oversampling * static_cast<int>(channel_grid.cols());

    CMat padded = CMat::Zero(lf, lt);
    padded.topLeftCorner(channel_grid.rows(), channel_grid.cols()) = channel_grid;
    {
        // Column-major: time runs with stride lf, frequency is contiguous.
        Plan along_time(lt, lf, lf, 1, padded.data(), FFTW_FORWARD);
        along_time.execute();
        Plan along_freq(lf, lt, 1, lf, padded.data(), FFTW_BACKWARD);
        along_freq.execute();
    }

    Surface out{delay_grid(lf), doppler_grid(lt), CMat(lf, lt)};
    const int offset = (lt + 1) / 2;
    for (int i = 0; i < lf; ++i) {
        const int m = (i + 1) % lf;
        for (int j = 0; j < lt; ++j) {
            const int q = ((j + 1 - offset) % lt + lt) % lt;
            out.values(i, j) = padded(m, q);
        }
    }
    return out;
}

MagnitudeSurface ambiguity_function(const Frame& frame, int oversampling) {
    if (oversampling < 1) throw ConfigError("oversampling must be >= 1");
    const DeviceModel model(frame.mask);
    const CVec power = vectorize(frame.mask, frame.grid).cwiseAbs2().cast<cplx>();
    const double origin = power.real().sum();

    MagnitudeSurface out{delay_grid(oversampling * frame.mask.n_subcarriers()),
                         doppler_grid(oversampling * frame.mask.n_symbols()), RMat()};
    const CMat grid = model.correlate_grid(power, out.taus, out.alphas);
    out.values = grid.cwiseAbs();
    if (origin > 0.0) out.values /= origin;
    return out;
}

EstimationReport unweighted_estimate(const Observation& obs, const EstimatorConfig& cfg) {
    const ZfChannel zf = zf_channel(obs);
    const Observation channel_obs{vectorize(obs.mask, zf.grid), CVec::Ones(obs.mask.n_used()), obs.mask,
                                  obs.noise_var};
    return estimate(channel_obs, cfg);
}

PathSet dft_peak_estimate(const CMat& channel_grid, int n_paths, int oversampling) {
    const Surface surface = dft_spreading(channel_grid, oversampling);
    const RMat mag = surface.values.cwiseAbs();
    const auto rows = mag.rows();
    const auto cols = mag.cols();

    std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> peaks;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double v = mag(i, j);
            bool is_max = v > 0.0;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const double w = mag((i + di + rows) % rows, (j + dj + cols) % cols);
                    // Plateaus keep only their first cell in scan order.
                    if (w > v || (w == v && (di < 0 || (di == 0 && dj < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.emplace_back(v, i, j);
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });

    const double support = static_cast<double>((channel_grid.array() != cplx(0.0, 0.0)).count());
    PathSet out;
    for (int p = 0; p < n_paths && p < static_cast<int>(peaks.size()); ++p) {
        const auto [v, i, j] = peaks[p];
        const cplx gamma = support > 0.0 ? surface.values(i, j) / support : cplx(0.0, 0.0);
        out.push_back(surface.taus[i], surface.alphas[j], gamma);
    }
    return out;
}

}  // namespace isacest
