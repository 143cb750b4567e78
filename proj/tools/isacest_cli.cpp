// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: Monte Carlo campaigns, surface exports and
// estimation from observation files.

#include "isacest/baselines.hpp"
#include "isacest/estimator.hpp"
#include "isacest/harness.hpp"
#include "isacest/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace isacest;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<double> snr;
    std::optional<int> trials;
    std::string out;
    std::vector<std::string> methods;
};

CampaignConfig load_config(const CommonOptions& opts) {
    CampaignConfig config = opts.config_path.empty() ? CampaignConfig{} : load_campaign_config(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (!opts.snr.empty()) config.snr_points_db = opts.snr;
    if (opts.trials) config.n_trials = *opts.trials;
    return config;
}

// Writes through `fn` to the --out file, or stdout when none is given.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    fn(out);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Key-value configuration file");
    cmd->add_option("--seed", opts.seed, "Campaign seed (overrides the config file)");
    cmd->add_option("--out", opts.out, "Output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint delay-Doppler estimation on sparse OFDMA grids"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo campaign, writes an MSE CSV");
    add_common(sim, sim_opts);
    sim->add_option("--snr", sim_opts.snr, "SNR points in dB")->delimiter(',');
    sim->add_option("--trials", sim_opts.trials, "Trials per SNR point");
    sim->add_option("--method", sim_opts.methods, "Methods: weighted, unweighted, zf_dft, mf_dft")->delimiter(',');
    std::optional<int> threads;
    sim->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    bool no_crb = false;
    sim->add_flag("--no-crb", no_crb, "Skip the Cramer-Rao bound column");

    CommonOptions af_opts;
    auto* af = app.add_subcommand("af", "Ambiguity function surface of one generated frame");
    add_common(af, af_opts);
    int af_oversampling = 4;
    bool pilots_only = false;
    int af_trial = 0;
    std::optional<double> af_slice;
    af->add_option("--oversampling", af_oversampling, "Grid oversampling per axis");
    af->add_flag("--pilots-only", pilots_only, "Zero the data amplitude");
    af->add_option("--trial", af_trial, "Realization index");
    af->add_option("--slice-alpha", af_slice, "Write only the delay slice nearest this Doppler shift");

    CommonOptions sf_opts;
    auto* sf = app.add_subcommand("sf", "Spreading-function surface or delay slice");
    add_common(sf, sf_opts);
    sf->add_option("--snr", sf_opts.snr, "SNR in dB");
    std::string sf_method = "weighted";
    int sf_oversampling = 4;
    int sf_trial = 0;
    std::optional<double> sf_slice;
    bool sf_estimate = false;
    sf->add_option("--method", sf_method, "weighted, unweighted, zf_dft or mf_dft");
    sf->add_option("--oversampling", sf_oversampling, "Grid oversampling per axis");
    sf->add_option("--trial", sf_trial, "Realization index");
    sf->add_option("--slice-alpha", sf_slice, "Evaluate a 1-D delay slice at this Doppler shift");
    sf->add_flag("--estimate", sf_estimate, "Run the matching estimator and add markers");

    CommonOptions obs_opts;
    auto* observe_cmd = app.add_subcommand("observe", "Generate one observation file");
    add_common(observe_cmd, obs_opts);
    observe_cmd->add_option("--snr", obs_opts.snr, "SNR in dB");
    int obs_trial = 0;
    std::string mask_out;
    std::string paths_out;
    observe_cmd->add_option("--trial", obs_trial, "Realization index");
    observe_cmd->add_option("--mask-out", mask_out, "Also write the allocation mask");
    observe_cmd->add_option("--paths-out", paths_out, "Also write the true paths as a report");

    CommonOptions est_opts;
    auto* est = app.add_subcommand("estimate", "Estimate paths from an observation file");
    add_common(est, est_opts);
    std::string obs_path;
    std::string mask_path;
    std::string est_method = "weighted";
    std::optional<int> n_paths;
    est->add_option("--obs", obs_path, "Observation file")->required();
    est->add_option("--mask", mask_path, "Mask file with the pilot/data split");
    est->add_option("--method", est_method, "weighted or unweighted");
    est->add_option("--paths", n_paths, "Model order (overrides n_paths)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) {
            CampaignConfig config = load_config(sim_opts);
            if (!sim_opts.methods.empty()) {
                config.methods.clear();
                for (const auto& m : sim_opts.methods) config.methods.push_back(parse_method(m));
            }
            if (threads) config.threads = *threads;
            if (no_crb) config.crb = false;
            config.validate();
            const CampaignResult result = run_campaign(config);
            with_output(sim_opts.out, [&](std::ostream& os) { write_mse_csv(os, result); });
        } else if (*af) {
            CampaignConfig config = load_config(af_opts);
            config.validate();
            SurfaceRequest request;
            request.kind = SurfaceKind::Ambiguity;
            request.oversampling = af_oversampling;
            request.pilots_only = pilots_only;
            request.trial = af_trial;
            request.slice_alpha = af_slice;
            request.snr_db = kNoiseless;
            const SurfaceExport surface = compute_surface(config, request);
            with_output(af_opts.out, [&](std::ostream& os) { write_surface(os, surface); });
        } else if (*sf) {
            CampaignConfig config = load_config(sf_opts);
            config.validate();
            SurfaceRequest request;
            request.kind = parse_surface(sf_method);
            if (request.kind == SurfaceKind::Ambiguity) throw ConfigError("use the 'af' subcommand for ambiguity surfaces");
            request.oversampling = sf_oversampling;
            request.snr_db = sf_opts.snr.empty() ? 10.0 : sf_opts.snr.front();
            request.trial = sf_trial;
            request.slice_alpha = sf_slice;
            request.with_estimate = sf_estimate;
            const SurfaceExport surface = compute_surface(config, request);
            with_output(sf_opts.out, [&](std::ostream& os) { write_surface(os, surface); });
        } else if (*observe_cmd) {
            CampaignConfig config = load_config(obs_opts);
            config.estimator.n_paths = config.paths.count();
            config.validate();
            const double snr = obs_opts.snr.empty() ? 10.0 : obs_opts.snr.front();
            const TrialRealization r = make_trial(config, obs_trial, snr);
            with_output(obs_opts.out, [&](std::ostream& os) { io::write_observation(os, r.obs); });
            if (!mask_out.empty()) with_output(mask_out, [&](std::ostream& os) { io::write_mask(os, r.obs.mask); });
            if (!paths_out.empty()) {
                EstimationReport truth;
                truth.paths = r.truth;
                truth.cost_trace.resize(r.truth.size());
                truth.converged.assign(r.truth.size(), true);
                truth.observation_energy = r.obs.y.squaredNorm();
                with_output(paths_out, [&](std::ostream& os) { io::write_report(os, truth); });
            }
        } else if (*est) {
            CampaignConfig config = load_config(est_opts);
            if (n_paths) config.paths.n_paths = *n_paths;
            EstimatorConfig cfg = config.estimator;
            cfg.n_paths = n_paths ? *n_paths : config.paths.count();
            cfg.validate();

            std::optional<AllocationMask> mask;
            if (!mask_path.empty()) {
                std::ifstream in(mask_path);
                if (!in) throw std::runtime_error("cannot open mask file '" + mask_path + "'");
                mask = io::read_mask(in);
            }
            std::ifstream in(obs_path);
            if (!in) throw std::runtime_error("cannot open observation file '" + obs_path + "'");
            const Observation obs = io::read_observation(in, mask ? &*mask : nullptr);

            const Method method = parse_method(est_method);
            EstimationReport report;
            if (method == Method::Weighted) report = estimate(obs, cfg);
            else if (method == Method::Unweighted) report = unweighted_estimate(obs, cfg);
            else throw ConfigError("estimate supports the weighted and unweighted methods");
            with_output(est_opts.out, [&](std::ostream& os) { io::write_report(os, report); });
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
