// SPDX-License-Identifier: Apache-2.0
#include "isacest/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace isacest {

void EstimatorConfig::validate() const {
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (coarse_oversampling < 1) throw ConfigError("coarse_oversampling must be >= 1");
    if (lm_max_iters < 0) throw ConfigError("lm_max_iters must be >= 0");
    if (joint_max_iters < 0) throw ConfigError("joint_max_iters must be >= 0");
    if (!(lm_tol > 0.0)) throw ConfigError("lm_tol must be > 0");
    if (!(lm_lambda0 > 0.0)) throw ConfigError("lm_lambda0 must be > 0");
    if (!(lm_lambda_up > 1.0)) throw ConfigError("lm_lambda_up must be > 1");
    if (!(lm_lambda_down > 0.0 && lm_lambda_down < 1.0)) throw ConfigError("lm_lambda_down must be in (0, 1)");
    if (residual_threshold && !(*residual_threshold > 0.0)) throw ConfigError("residual_threshold must be > 0");
}

cplx spreading_function(const Observation& obs, double tau, double alpha) {
    obs.validate();
    const DeviceModel model(obs.mask);
    const CVec reference = obs.x_hat.cwiseProduct(model.steering(tau, alpha));
    return reference.dot(obs.y);  // dot() conjugates its left operand
}

CMat spreading_grid(const DeviceModel& model, const CVec& x_hat, const CVec& residual,
                    const RVec& taus, const RVec& alphas) {
    if (residual.size() != model.n_used() || x_hat.size() != model.n_used()) {
        throw DimensionError("residual and x_hat must have one entry per used element");
    }
    return model.correlate_grid(x_hat.conjugate().cwiseProduct(residual), taus, alphas);
}

namespace {

CoarsePeak coarse_peak(const DeviceModel& model, const CVec& x_hat, const CVec& residual, int oversampling) {
    const RVec taus = delay_grid(oversampling * model.n_subcarriers());
    const RVec alphas = doppler_grid(oversampling * model.n_symbols());
    const CMat grid = spreading_grid(model, x_hat, residual, taus, alphas);

    Eigen::Index best_i = 0;
    Eigen::Index best_j = 0;
    double best = std::abs(grid(0, 0));
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.cols(); ++j) {
            const double m = std::abs(grid(i, j));
            // Near-equal peaks keep the earlier (smaller tau, then alpha) point.
            if (m > best * (1.0 + 1e-12) && m > best) {
                best = m;
                best_i = i;
                best_j = j;
            }
        }
    }
    return {taus[best_i], alphas[best_j], best};
}

PathSet single_path(double tau, double alpha, cplx gamma) {
    PathSet p;
    p.push_back(tau, alpha, gamma);
    return p;
}

}  // namespace

CoarsePeak coarse_search(const Observation& obs, const CVec& residual, const EstimatorConfig& cfg) {
    obs.validate();
    return coarse_peak(DeviceModel(obs.mask), obs.x_hat, residual, cfg.coarse_oversampling);
}

CVec blue_weights(const DeviceModel& model, const CVec& x_hat, const CVec& target,
                  std::span<const double> taus, std::span<const double> alphas) {
    if (taus.size() != alphas.size()) throw DimensionError("taus and alphas differ in length");
    if (target.size() != model.n_used() || x_hat.size() != model.n_used()) {
        throw DimensionError("target and x_hat must have one entry per used element");
    }
    const auto np = static_cast<Eigen::Index>(taus.size());
    if (np == 0) return CVec(0);

    CMat z(model.n_used(), np);
    for (Eigen::Index p = 0; p < np; ++p) z.col(p) = x_hat.cwiseProduct(model.steering(taus[p], alphas[p]));

    Eigen::ColPivHouseholderQR<CMat> qr(z.rows(), z.cols());
    qr.setThreshold(1e-10);
    qr.compute(z);
    if (qr.rank() < np) {
        // Name the most collinear pair (or a vanishing column).
        Eigen::Index a = 0;
        Eigen::Index b = 0;
        double worst = -1.0;
        for (Eigen::Index i = 0; i < np; ++i) {
            const double ni = z.col(i).norm();
            if (ni == 0.0) {
                throw SingularityError("path " + std::to_string(i + 1) + " has an all-zero weighted response");
            }
            for (Eigen::Index j = i + 1; j < np; ++j) {
                const double c = std::abs(z.col(i).dot(z.col(j))) / (ni * z.col(j).norm());
                if (c > worst) {
                    worst = c;
                    a = i;
                    b = j;
                }
            }
        }
        throw SingularityError("rank-deficient path model: paths " + std::to_string(a + 1) + " and " +
                               std::to_string(b + 1) + " collide");
    }
    return qr.solve(target);
}

CVec blue_weights(const Observation& obs, std::span<const double> taus, std::span<const double> alphas) {
    obs.validate();
    return blue_weights(DeviceModel(obs.mask), obs.x_hat, obs.y, taus, alphas);
}

RefineResult refine_paths(const DeviceModel& model, const CVec& x_hat, const CVec& target,
                          double noise_var, const PathSet& init, const EstimatorConfig& cfg,
                          int max_iters) {
    init.check_lengths();
    const int np = init.size();
    RefineResult result;
    result.paths = init;
    for (int p = 0; p < np; ++p) {
        result.paths.taus[p] = wrap_delay(init.taus[p]);
        result.paths.alphas[p] = wrap_doppler(init.alphas[p]);
    }

    auto cost_of = [&](const PathSet& paths) {
        return (target - model.signal(paths, x_hat)).squaredNorm() / noise_var;
    };
    auto pack = [np](const PathSet& paths) {
        RVec theta(4 * np);
        for (int p = 0; p < np; ++p) {
            theta[p] = paths.taus[p];
            theta[np + p] = paths.alphas[p];
            theta[2 * np + p] = paths.gammas[p].real();
            theta[3 * np + p] = paths.gammas[p].imag();
        }
        return theta;
    };
    auto unpack = [np](const RVec& theta) {
        PathSet paths;
        for (int p = 0; p < np; ++p) {
            paths.push_back(wrap_delay(theta[p]), wrap_doppler(theta[np + p]),
                            cplx(theta[2 * np + p], theta[3 * np + p]));
        }
        return paths;
    };

    double cost = cost_of(result.paths);
    result.cost_trace.push_back(cost);
    if (!std::isfinite(cost)) throw OptimizationError("non-finite initial cost", result.cost_trace);
    if (np == 0) {
        result.converged = true;
        return result;
    }

    double lambda = cfg.lm_lambda0;
    RVec theta = pack(result.paths);
    while (result.iterations < max_iters) {
        const CMat jac = model.jacobian(result.paths, x_hat);
        const CVec residual = target - model.signal(result.paths, x_hat);
        const RMat normal = (jac.adjoint() * jac).real();
        const RVec gradient = (jac.adjoint() * residual).real();

        RVec scale = normal.diagonal();
        const double floor = std::max(scale.maxCoeff(), 1.0) * 1e-12;
        scale = scale.cwiseMax(floor);

        const RMat damped = normal + lambda * RMat(scale.asDiagonal());
        const RVec step = damped.ldlt().solve(gradient);
        ++result.iterations;
        if (!step.allFinite()) throw OptimizationError("non-finite Levenberg-Marquardt step", result.cost_trace);

        const bool negligible = step.norm() <= cfg.lm_tol * (theta.norm() + cfg.lm_tol);
        const PathSet candidate = unpack(theta + step);
        const double candidate_cost = cost_of(candidate);
        if (!std::isfinite(candidate_cost)) {
            throw OptimizationError("non-finite cost during Levenberg-Marquardt", result.cost_trace);
        }

        if (candidate_cost <= cost) {
            result.paths = candidate;
            theta = pack(candidate);
            cost = candidate_cost;
            result.cost_trace.push_back(cost);
            lambda *= cfg.lm_lambda_down;
        } else {
            lambda *= cfg.lm_lambda_up;
        }
        if (negligible) {
            result.converged = true;
            break;
        }
    }
    return result;
}

RefineResult lm_refine(const Observation& obs, const CVec& residual_base, const PathParams& init,
                       const EstimatorConfig& cfg) {
    obs.validate();
    if (!std::isfinite(init.tau) || !std::isfinite(init.alpha) || !std::isfinite(init.gamma.real()) ||
        !std::isfinite(init.gamma.imag())) {
        throw ConfigError("initial path parameters must be finite");
    }
    if (residual_base.size() != obs.mask.n_used()) throw DimensionError("residual length does not match the mask");
    return refine_paths(DeviceModel(obs.mask), obs.x_hat, residual_base, obs.noise_var,
                        single_path(init.tau, init.alpha, init.gamma), cfg, cfg.lm_max_iters);
}

EstimationReport estimate(const Observation& obs, const EstimatorConfig& cfg) {
    obs.validate();
    cfg.validate();
    const DeviceModel model(obs.mask);

    EstimationReport report;
    report.observation_energy = obs.y.squaredNorm();

    PathSet found;
    CVec residual = obs.y;
    for (int p = 0; p < cfg.n_paths; ++p) {
        const std::string context = "path " + std::to_string(p + 1) + ": ";
        try {
            const CoarsePeak peak = coarse_peak(model, obs.x_hat, residual, cfg.coarse_oversampling);
            const std::array<double, 1> tau0{peak.tau};
            const std::array<double, 1> alpha0{peak.alpha};
            const cplx gamma0 = blue_weights(model, obs.x_hat, residual, tau0, alpha0)[0];

            RefineResult refined = refine_paths(model, obs.x_hat, residual, obs.noise_var,
                                                single_path(peak.tau, peak.alpha, gamma0), cfg, cfg.lm_max_iters);
            found.push_back(refined.paths.taus[0], refined.paths.alphas[0], refined.paths.gammas[0]);

            const CVec gammas = blue_weights(model, obs.x_hat, obs.y, found.taus, found.alphas);
            for (int q = 0; q < found.size(); ++q) found.gammas[q] = gammas[q];
            residual = obs.y - model.signal(found, obs.x_hat);

            report.residual_energy.push_back(residual.squaredNorm());
            report.cost_trace.push_back(std::move(refined.cost_trace));
            report.converged.push_back(refined.converged);
        } catch (const SingularityError& e) {
            throw SingularityError(context + e.what());
        } catch (const OptimizationError& e) {
            throw OptimizationError(context + e.what(), e.trace());
        }
        if (cfg.residual_threshold && report.observation_energy > 0.0 &&
            report.residual_energy.back() / report.observation_energy < *cfg.residual_threshold) {
            break;
        }
    }

    if (cfg.final_joint_refine && !found.empty()) {
        try {
            RefineResult joint = refine_paths(model, obs.x_hat, obs.y, obs.noise_var, found, cfg, cfg.joint_max_iters);
            found = std::move(joint.paths);
            report.joint_cost_trace = std::move(joint.cost_trace);
            report.joint_converged = joint.converged;
        } catch (const OptimizationError& e) {
            throw OptimizationError(std::string("joint refinement: ") + e.what(), e.trace());
        }
    }
    report.final_residual_energy = (obs.y - model.signal(found, obs.x_hat)).squaredNorm();

    std::vector<int> order(found.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(found.gammas[a]) > std::abs(found.gammas[b]); });
    PathSet sorted;
    std::vector<std::vector<double>> traces;
    std::vector<bool> converged;
    for (int idx : order) {
        sorted.push_back(found.taus[idx], found.alphas[idx], found.gammas[idx]);
        traces.push_back(std::move(report.cost_trace[idx]));
        converged.push_back(report.converged[idx]);
    }
    report.paths = std::move(sorted);
    report.cost_trace = std::move(traces);
    report.converged = std::move(converged);
    return report;
}

}  // namespace isacest
