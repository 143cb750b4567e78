// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/channel.hpp"
#include "isacest/model.hpp"
#include "isacest/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace isacest {

struct EstimatorConfig {
    /// Known model order P.
    int n_paths = 3;
    /// Coarse grid has (oversampling * N_F) x (oversampling * N_T) points.
    int coarse_oversampling = 4;
    int lm_max_iters = 50;
    /// Stop once ||step|| <= lm_tol * (||theta|| + lm_tol).
    double lm_tol = 1e-10;
    double lm_lambda0 = 1e-2;
    double lm_lambda_up = 10.0;
    double lm_lambda_down = 0.3;
    /// Early stop when ||r||^2 / ||y||^2 drops below this value.
    std::optional<double> residual_threshold;
    /// After successive cancellation, refine all 4P parameters jointly.
    bool final_joint_refine = true;
    int joint_max_iters = 100;

    void validate() const;
};

/// One path's parameters.
struct PathParams {
    double tau = 1.0;
    double alpha = 0.0;
    cplx gamma{0.0, 0.0};
};

struct RefineResult {
    PathSet paths;
    /// Accepted costs, starting with the initial cost. Non-increasing.
    std::vector<double> cost_trace;
    int iterations = 0;
    bool converged = false;
};

struct CoarsePeak {
    double tau = 1.0;
    double alpha = 0.0;
    double magnitude = 0.0;
};

struct EstimationReport {
    /// Sorted by descending |gamma|.
    PathSet paths;
    /// ||r^p||^2 after each successive-cancellation step.
    std::vector<double> residual_energy;
    /// ||y - s(paths)||^2 for the returned paths.
    double final_residual_energy = 0.0;
    double observation_energy = 0.0;
    /// Per returned path, the cost trace of its own refinement.
    std::vector<std::vector<double>> cost_trace;
    std::vector<bool> converged;
    /// Cost trace of the final joint refinement (empty when disabled).
    std::vector<double> joint_cost_trace;
    bool joint_converged = false;
};

/// C(tau, alpha) = (x_hat .* a(tau, alpha))^H y.
cplx spreading_function(const Observation& obs, double tau, double alpha);

/// C(tau_i, alpha_j) with `residual` in place of y. Rows follow `taus`,
/// columns `alphas`.
CMat spreading_grid(const DeviceModel& model, const CVec& x_hat, const CVec& residual,
                    const RVec& taus, const RVec& alphas);

/// Argmax of |C| over the coarse grid. Ties go to the smallest tau, then the
/// smallest alpha.
CoarsePeak coarse_search(const Observation& obs, const CVec& residual, const EstimatorConfig& cfg);

/// Jointly estimated path weights (Z^H R^-1 Z)^-1 Z^H R^-1 y with
/// Z = diag(x_hat) A(taus, alphas), via column-pivoted QR.
/// Throws SingularityError naming the colliding paths when Z loses rank.
CVec blue_weights(const Observation& obs, std::span<const double> taus,
                  std::span<const double> alphas);

/// Same, against an arbitrary target vector instead of obs.y.
CVec blue_weights(const DeviceModel& model, const CVec& x_hat, const CVec& target,
                  std::span<const double> taus, std::span<const double> alphas);

/// Levenberg-Marquardt refinement of one path against `residual_base`.
RefineResult lm_refine(const Observation& obs, const CVec& residual_base, const PathParams& init,
                       const EstimatorConfig& cfg);

/// Levenberg-Marquardt over every parameter of `init` jointly, minimizing
/// ||target - s(paths)||^2 / noise_var. `max_iters` overrides cfg.lm_max_iters.
RefineResult refine_paths(const DeviceModel& model, const CVec& x_hat, const CVec& target,
                          double noise_var, const PathSet& init, const EstimatorConfig& cfg,
                          int max_iters);

/// Coarse search, single-path refinement, joint weight re-fit and residual
/// update for p = 1..P, then the optional joint refinement.
EstimationReport estimate(const Observation& obs, const EstimatorConfig& cfg);

}  // namespace isacest
