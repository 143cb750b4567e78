// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/baselines.hpp"
#include "isacest/channel.hpp"
#include "isacest/estimator.hpp"
#include "isacest/grid.hpp"
#include "isacest/txgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isacest {

enum class Method { Weighted, Unweighted, ZfDft, MfDft };

std::string_view method_name(Method method);
/// Throws ConfigError for unknown names.
Method parse_method(std::string_view name);

/// Ground-truth paths: either fixed values or random draws per trial.
struct PathSpec {
    bool random = true;
    PathSet fixed;
    int n_paths = 3;
    double gamma_min = 0.5;
    double gamma_max = 1.0;
    /// Minimum wrapped Chebyshev distance between random paths, in
    /// resolution cells (1/N_F in delay, 1/N_T in Doppler).
    double min_separation_cells = 2.0;

    int count() const { return random ? n_paths : fixed.size(); }
};

struct CampaignConfig {
    GridConfig grid;
    ModulationConfig modulation;
    double eta = 0.45;
    double beta = 0.9;
    PathSpec paths;
    std::vector<double> snr_points_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    int n_trials = 500;
    EstimatorConfig estimator;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::Weighted, Method::Unweighted};
    bool crb = true;
    /// Draw a fresh data placement for every trial (pilot lattice is fixed).
    bool redraw_mask = true;
    /// Worker threads; 0 uses the hardware concurrency.
    int threads = 0;

    void validate() const;
};

/// Applies one `key = value` entry. Throws ConfigError on unknown keys or bad values.
void apply_config_entry(CampaignConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text, `#` starts a comment. Unlisted keys keep defaults.
CampaignConfig parse_campaign_config(std::istream& in);
CampaignConfig load_campaign_config(const std::string& path);

/// Everything one trial needs, reproducible from (config, trial, snr).
struct TrialRealization {
    Frame frame;
    PathSet truth;
    Observation obs;
};

/// Trial `trial` at `snr_db`. Mask, payload and paths depend only on the
/// trial index; the noise also depends on the SNR point.
TrialRealization make_trial(const CampaignConfig& config, int trial, double snr_db,
                            std::size_t snr_index = 0);

/// Draws P paths in the normalized windows with the configured separation.
PathSet draw_paths(const PathSpec& spec, int n_subcarriers, int n_symbols, std::uint64_t seed);

/// Minimum-cost assignment (Hungarian algorithm). cost is rows x cols with
/// rows <= cols; returns the column assigned to each row.
std::vector<int> min_cost_assignment(const RMat& cost);

struct PathErrors {
    /// Squared wrapped errors of matched pairs, in truth order.
    std::vector<double> tau_sq;
    std::vector<double> alpha_sq;
};

/// Matches estimates to truth by minimum total wrapped (dtau^2 + dalpha^2).
/// Throws std::invalid_argument if there are fewer estimates than true paths.
PathErrors match_paths(const PathSet& truth, const PathSet& estimate);

struct MseRow {
    double snr_db = 0.0;
    Method method = Method::Weighted;
    std::string param;
    double mse = 0.0;
    double mse_stderr = 0.0;
    /// Mean CRB over the same successful trials; NaN when disabled.
    double crb = 0.0;
    int n_ok = 0;
    int n_fail = 0;
};

/// Per-trial squared error (mean over paths) for one SNR point and method;
/// NaN marks failed trials.
struct TrialSeries {
    double snr_db = 0.0;
    Method method = Method::Weighted;
    std::vector<double> tau;
    std::vector<double> alpha;
    std::vector<double> crb_tau;
    std::vector<double> crb_alpha;
};

struct CampaignResult {
    std::vector<MseRow> rows;
    std::vector<TrialSeries> series;

    const MseRow& row(double snr_db, Method method, std::string_view param) const;
    const TrialSeries& trials(double snr_db, Method method) const;
};

/// Monte Carlo MSE of every configured method over all SNR points. Trials
/// run on a thread pool; results are reduced in trial order, so the output
/// does not depend on the number of threads.
CampaignResult run_campaign(const CampaignConfig& config);

/// CSV with header `snr_db,method,param,mse,crb,n_ok,n_fail`.
void write_mse_csv(std::ostream& out, const CampaignResult& result);

enum class SurfaceKind { Ambiguity, Weighted, Unweighted, ZfDft, MfDft };

std::string_view surface_name(SurfaceKind kind);
SurfaceKind parse_surface(std::string_view name);

struct SurfaceRequest {
    SurfaceKind kind = SurfaceKind::Weighted;
    int oversampling = 4;
    double snr_db = 10.0;
    /// Ambiguity only: zero the data amplitude.
    bool pilots_only = false;
    /// Evaluate a 1-D delay slice at this Doppler shift instead of the full surface.
    std::optional<double> slice_alpha;
    /// Run the matching estimator and attach its paths as markers.
    bool with_estimate = false;
    int trial = 0;
};

/// Magnitude surface normalized to peak 1, plus path markers.
struct SurfaceExport {
    SurfaceKind kind = SurfaceKind::Weighted;
    RVec taus;
    RVec alphas;
    RMat values;
    PathSet truth;
    std::optional<PathSet> estimate;
};

SurfaceExport compute_surface(const CampaignConfig& config, const SurfaceRequest& request);

/// `tau,alpha,value` triplets. Markers go first as `# true ...` / `# estimate ...` lines.
void write_surface(std::ostream& out, const SurfaceExport& surface);

}  // namespace isacest
