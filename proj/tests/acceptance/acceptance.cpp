// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include "isacest/baselines.hpp"
#include "isacest/bounds.hpp"
#include "isacest/estimator.hpp"
#include "isacest/harness.hpp"
#include "isacest/model.hpp"
#include "isacest/rng.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

using namespace isacest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// 1. Noiseless P = 3 recovery on the default grid.
void noiseless_exactness() {
    CampaignConfig cfg;
    cfg.paths.min_separation_cells = 3.0;
    const int instances = 20;
    double worst_err = 0.0;
    double worst_residual = 0.0;
    double worst_time = 0.0;
    for (int trial = 0; trial < instances; ++trial) {
        const auto t = make_trial(cfg, trial, kNoiseless);
        const auto start = Clock::now();
        const auto rep = estimate(t.obs, cfg.estimator);
        worst_time = std::max(worst_time, seconds_since(start));
        const auto err = match_paths(t.truth, rep.paths);
        for (int p = 0; p < t.truth.size(); ++p) {
            worst_err = std::max({worst_err, std::sqrt(err.tau_sq[p]), std::sqrt(err.alpha_sq[p])});
        }
        worst_residual = std::max(worst_residual, rep.final_residual_energy / rep.observation_energy);
    }
    report(1, "noiseless exactness", worst_err < 1e-8 && worst_residual < 1e-14 && worst_time < 10.0,
           fmt("%d instances, max |error| %.3g, max residual/||y||^2 %.3g, max time %.3f s", instances, worst_err,
               worst_residual, worst_time));
}

// 2 and 3. Monte Carlo campaign with the default configuration.
void campaign() {
    CampaignConfig cfg;
    cfg.n_trials = 500;
    cfg.methods = {Method::Weighted, Method::Unweighted};
    const auto start = Clock::now();
    const auto result = run_campaign(cfg);
    const double elapsed = seconds_since(start);

    bool attain = true;
    bool above = true;
    std::string detail;
    for (double snr : cfg.snr_points_db) {
        for (const char* param : {"tau", "alpha"}) {
            const auto& row = result.row(snr, Method::Weighted, param);
            const double ratio = row.mse / row.crb;
            if (row.n_fail > 0) attain = false;
            if (snr >= 20.0 && !(ratio < 2.0)) attain = false;
            if (!(row.mse + 3.0 * row.mse_stderr >= row.crb)) above = false;
            detail += fmt(" %s@%g=%.3f", param, snr, ratio);
        }
    }
    report(2, "CRB attainment", attain && above && elapsed < 1800.0,
           fmt("MSE/CRB%s; %d trials per point, %.1f s", detail.c_str(), cfg.n_trials, elapsed));

    bool ordered = true;
    bool strict = true;
    std::string gaps;
    for (double snr : cfg.snr_points_db) {
        const auto& w = result.trials(snr, Method::Weighted);
        const auto& u = result.trials(snr, Method::Unweighted);
        for (const char* param : {"tau", "alpha"}) {
            const double mw = result.row(snr, Method::Weighted, param).mse;
            const double mu = result.row(snr, Method::Unweighted, param).mse;
            if (!(mu >= mw)) ordered = false;
            if (snr <= 10.0) {
                // Paired sign test: the unweighted error is larger in a
                // significant majority of trials. Robust to the rare
                // wrong-peak outliers that dominate a mean-difference SE.
                const auto& a = param == std::string("tau") ? u.tau : u.alpha;
                const auto& b = param == std::string("tau") ? w.tau : w.alpha;
                int larger = 0;
                int n = 0;
                for (std::size_t k = 0; k < a.size(); ++k) {
                    if (std::isnan(a[k]) || std::isnan(b[k])) continue;
                    larger += a[k] > b[k] ? 1 : 0;
                    ++n;
                }
                const double z = (larger - 0.5 * n) / std::sqrt(0.25 * n);
                if (!(mu > mw && z > 3.0)) strict = false;
                gaps += fmt(" %s@%g=%d/%d(z=%.1f,ratio=%.1f)", param, snr, larger, n, z, mu / mw);
            }
        }
    }
    report(3, "weighted beats unweighted", ordered && strict,
           fmt("unweighted >= weighted at every point: %s; trials with larger unweighted error at <= 10 dB:%s", ordered ? "yes" : "no",
               gaps.c_str()));
}

// 4. DFT spreading of the ZF channel equals the spreading function on a full grid.
void dft_equivalence() {
    const int nf = 32;
    const int nt = 20;
    const auto mask = oracle::full_mask(nf, nt);
    PathSet paths;
    paths.push_back(0.2371, 0.1432, {0.8, -0.3});
    paths.push_back(0.6112, -0.3719, {0.1, 0.6});
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.1);
    Observation obs{oracle::received(mask, CVec::Ones(nf * nt), paths), CVec::Ones(nf * nt), mask, 0.02};
    for (Eigen::Index i = 0; i < obs.y.size(); ++i) obs.y[i] += cplx(n(rng), n(rng));

    double worst = 0.0;
    for (int os : {1, 2, 4}) {
        const Surface s = dft_spreading(zf_channel(obs).grid, os);
        CMat direct(s.values.rows(), s.values.cols());
        for (Eigen::Index i = 0; i < direct.rows(); ++i)
            for (Eigen::Index j = 0; j < direct.cols(); ++j) direct(i, j) = spreading_function(obs, s.taus[i], s.alphas[j]);
        worst = std::max(worst, (s.values - direct).cwiseAbs().maxCoeff() / max_abs(direct));
    }
    report(4, "DFT equivalence", worst < 1e-10, fmt("max relative deviation %.3g over oversampling 1, 2, 4", worst));
}

// 5. Analytic Jacobian against central differences of the signal model.
void jacobian_check() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> tau(0.01, 0.99);
    std::uniform_real_distribution<double> alpha(-0.49, 0.49);
    std::normal_distribution<double> g;
    const auto mask = build_mask(GridConfig{});
    const DeviceModel model(mask);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const int n_paths = 1 + draw % 5;
        PathSet p;
        for (int q = 0; q < n_paths; ++q) p.push_back(tau(rng), alpha(rng), {g(rng), g(rng)});
        CVec x(mask.n_used());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = cplx(g(rng), g(rng));
        const CMat jac = model.jacobian(p, x);
        const double h = 1e-6;
        for (int col = 0; col < 4 * n_paths; ++col) {
            auto shifted = [&](double d) {
                PathSet s = p;
                const int q = col % n_paths;
                switch (col / n_paths) {
                    case 0: s.taus[q] += d; break;
                    case 1: s.alphas[q] += d; break;
                    case 2: s.gammas[q] += cplx(d, 0.0); break;
                    default: s.gammas[q] += cplx(0.0, d); break;
                }
                return oracle::received(mask, x, s);
            };
            const CVec fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            worst = std::max(worst, (jac.col(col) - fd).norm() / fd.norm());
        }
    }
    report(5, "Jacobian correctness", worst < 1e-5, fmt("100 draws, max column relative error %.3g", worst));
}

// 6. BLUE weight variance against the gamma block of the bound.
void blue_optimality() {
    const auto start = Clock::now();
    CampaignConfig cfg;
    const auto base = make_trial(cfg, 0, 10.0);
    const PathSet& truth = base.truth;
    const int n_paths = truth.size();
    const int trials = 10000;

    RVec var_sum = RVec::Zero(n_paths);
    CVec mean = CVec::Zero(n_paths);
    for (int k = 0; k < trials; ++k) {
        const auto obs = observe(base.frame, truth, 10.0, derive_seed(cfg.seed, stream::kNoise, 100000 + k));
        const CVec g = blue_weights(obs, truth.taus, truth.alphas);
        for (int p = 0; p < n_paths; ++p) {
            mean[p] += g[p];
            var_sum[p] += std::norm(g[p] - truth.gammas[p]);
        }
    }
    const RMat fim = fisher_information(truth, base.obs.x_hat, base.frame.mask,
                                        SamplingAxes::for_grid(cfg.grid.n_subcarriers, cfg.grid.n_symbols),
                                        base.obs.noise_var);
    std::vector<int> idx;
    for (int p = 0; p < n_paths; ++p) idx.push_back(2 * n_paths + p);
    for (int p = 0; p < n_paths; ++p) idx.push_back(3 * n_paths + p);
    const RVec bound = crb_subset(fim, idx);

    bool ok = true;
    std::string detail;
    for (int p = 0; p < n_paths; ++p) {
        const double empirical = var_sum[p] / trials;
        const double expected = bound[p] + bound[n_paths + p];
        const double rel = empirical / expected - 1.0;
        if (!(std::abs(rel) < 0.05)) ok = false;
        detail += fmt(" path%d %+.2f%%", p + 1, 100.0 * rel);
    }
    const double elapsed = seconds_since(start);
    report(6, "BLUE optimality", ok && elapsed < 300.0,
           fmt("variance vs bound:%s; %d trials, %.1f s", detail.c_str(), trials, elapsed));
}

// 7. Ambiguity function of the pilot lattice and of the full frame.
void aliasing() {
    CampaignConfig cfg;
    const auto trial = make_trial(cfg, 0, kNoiseless);
    const int nf = cfg.grid.n_subcarriers;
    const int nt = cfg.grid.n_symbols;
    const int os = 4;

    Frame pilots = trial.frame;
    for (const auto& re : pilots.mask.data()) pilots.grid(re.subcarrier, re.symbol) = 0.0;
    const auto af_pilots = ambiguity_function(pilots, os);

    // Lattice-reciprocal points: multiples of 1/spacing on each axis.
    const CVec power = vectorize(pilots.mask, pilots.grid).cwiseAbs2().cast<cplx>();
    const CVec ones = CVec::Ones(power.size());
    const double origin = power.real().sum();
    double weakest_lobe = 1e300;
    double oracle_weakest = 1e300;
    for (int i = 0; i < af_pilots.taus.size(); ++i) {
        for (int j = 0; j < af_pilots.alphas.size(); ++j) {
            const double ti = af_pilots.taus[i] * cfg.grid.pilot_spacing_freq;
            const double aj = af_pilots.alphas[j] * cfg.grid.pilot_spacing_time;
            const bool reciprocal = std::abs(ti - std::round(ti)) < 1e-9 && std::abs(aj - std::round(aj)) < 1e-9;
            const bool origin_point = std::abs(wrapped_difference(af_pilots.taus[i], 1.0)) < 1e-12 &&
                                      std::abs(af_pilots.alphas[j]) < 1e-12;
            if (!reciprocal || origin_point) continue;
            weakest_lobe = std::min(weakest_lobe, af_pilots.values(i, j));
            oracle_weakest = std::min(
                oracle_weakest,
                std::abs(oracle::spreading(pilots.mask, ones, power, af_pilots.taus[i], af_pilots.alphas[j])) / origin);
        }
    }

    const auto af_full = ambiguity_function(trial.frame, os);
    double sidelobe = 0.0;
    for (int i = 0; i < af_full.taus.size(); ++i) {
        for (int j = 0; j < af_full.alphas.size(); ++j) {
            const double dt = std::abs(wrapped_difference(af_full.taus[i], 1.0)) * nf;
            const double da = std::abs(af_full.alphas[j]) * nt;
            if (dt < 1.0 && da < 1.0) continue;  // main lobe
            sidelobe = std::max(sidelobe, af_full.values(i, j));
        }
    }
    report(7, "aliasing", weakest_lobe > 0.9 && sidelobe < 0.5,
           fmt("pilots-only weakest lattice lobe %.4f (direct sum %.4f); with data max side-lobe %.4f", weakest_lobe,
               oracle_weakest, sidelobe));
}

// 8. Successive cancellation removes one noiseless path and its side-lobes.
void sidelobe_cancellation() {
    CampaignConfig cfg;
    cfg.paths.n_paths = 1;
    cfg.estimator.n_paths = 1;
    double worst_drop = 1e300;
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = make_trial(cfg, trial, kNoiseless);
        const auto rep = estimate(t.obs, cfg.estimator);
        const DeviceModel model(t.obs.mask);
        const RVec taus = delay_grid(4 * cfg.grid.n_subcarriers);
        const RVec alphas = doppler_grid(4 * cfg.grid.n_symbols);
        const CVec residual = t.obs.y - model.signal(rep.paths, t.obs.x_hat);
        const double before = max_abs(spreading_grid(model, t.obs.x_hat, t.obs.y, taus, alphas));
        const double after = max_abs(spreading_grid(model, t.obs.x_hat, residual, taus, alphas));
        worst_drop = std::min(worst_drop, 20.0 * std::log10(before / std::max(after, 1e-300)));
    }
    report(8, "side-lobe cancellation", worst_drop >= 40.0, fmt("smallest drop of max|C| %.1f dB over 5 paths", worst_drop));
}

// 9. Repeated CLI invocations give identical files.
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism() {
#ifdef ISACEST_CLI_PATH
    const std::string cli = ISACEST_CLI_PATH;
    struct Run {
        const char* name;
        std::string args;
    };
    const Run runs[] = {
        {"simulate", "simulate --trials 4 --snr 0,20 --method weighted,unweighted,zf_dft,mf_dft --seed 7"},
        {"af", "af --oversampling 2 --seed 7"},
        {"sf", "sf --snr 10 --method weighted --estimate --seed 7"},
        {"observe", "observe --snr 15 --trial 2 --seed 7"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& run : runs) {
        std::string out[2];
        for (int rep = 0; rep < 2; ++rep) {
            const std::string path = std::string("determinism_") + run.name + std::to_string(rep) + ".txt";
            const std::string cmd = cli + " " + run.args + " --out " + path;
            if (std::system(cmd.c_str()) != 0) ok = false;
            out[rep] = slurp(path);
        }
        const bool same = !out[0].empty() && out[0] == out[1];
        ok = ok && same;
        detail += fmt(" %s=%s", run.name, same ? "same" : "DIFFERENT");
    }
    // estimate reads the observation written above
    std::string est[2];
    for (int rep = 0; rep < 2; ++rep) {
        const std::string path = "determinism_estimate" + std::to_string(rep) + ".txt";
        const std::string cmd = cli + " estimate --obs determinism_observe0.txt --out " + path;
        if (std::system(cmd.c_str()) != 0) ok = false;
        est[rep] = slurp(path);
    }
    const bool same = !est[0].empty() && est[0] == est[1];
    ok = ok && same;
    detail += fmt(" estimate=%s", same ? "same" : "DIFFERENT");
    report(9, "determinism", ok, fmt("byte comparison of two runs:%s", detail.c_str()));
#else
    report(9, "determinism", false, "CLI not built");
#endif
}

}  // namespace

int main() {
    noiseless_exactness();
    campaign();
    dft_equivalence();
    jacobian_check();
    blue_optimality();
    aliasing();
    sidelobe_cancellation();
    determinism();
    std::printf("%s\n", failures == 0 ? "all acceptance criteria passed" : "acceptance criteria failed");
    return failures == 0 ? 0 : 1;
}
