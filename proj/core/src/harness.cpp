// SPDX-License-Identifier: Apache-2.0
#include "isacest/harness.hpp"

#include "isacest/bounds.hpp"
#include "isacest/io.hpp"
#include "isacest/model.hpp"
#include "isacest/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

namespace isacest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto end = s.find_first_of(", \t", pos);
        const auto token = s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        if (!token.empty()) out.push_back(token);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": not a number: '" + std::string(text) + "'");
    }
    return v;
}

long long parse_integer(std::string_view key, std::string_view text) {
    text = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": not an integer: '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text) {
    const long long v = parse_integer(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(std::string(key) + ": out of range");
    }
    return static_cast<int>(v);
}

std::uint64_t parse_seed(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": not an unsigned integer: '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

std::vector<double> parse_doubles(std::string_view key, std::string_view text) {
    std::vector<double> out;
    for (auto token : split_list(text)) out.push_back(parse_double(key, token));
    return out;
}

double chebyshev_cells(double tau_a, double alpha_a, double tau_b, double alpha_b, int n_sub, int n_sym) {
    return std::max(std::abs(wrapped_difference(tau_a, tau_b)) * n_sub,
                    std::abs(wrapped_difference(alpha_a, alpha_b)) * n_sym);
}

}  // namespace

std::string_view method_name(Method method) {
    switch (method) {
        case Method::Weighted: return "weighted";
        case Method::Unweighted: return "unweighted";
        case Method::ZfDft: return "zf_dft";
        case Method::MfDft: return "mf_dft";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    name = trim(name);
    for (Method m : {Method::Weighted, Method::Unweighted, Method::ZfDft, Method::MfDft}) {
        if (method_name(m) == name) return m;
    }
    throw ConfigError("unknown method '" + std::string(name) + "' (weighted, unweighted, zf_dft, mf_dft)");
}

void CampaignConfig::validate() const {
    grid.validate();
    modulation.validate();
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta must be in [0, 1)");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0, 1)");
    if (paths.random) {
        if (paths.n_paths < 1) throw ConfigError("n_paths must be >= 1");
        if (!(paths.gamma_min > 0.0) || !(paths.gamma_max >= paths.gamma_min)) {
            throw ConfigError("path weights need 0 < gamma_min <= gamma_max");
        }
        if (!(paths.min_separation_cells >= 0.0)) throw ConfigError("min_separation_cells must be >= 0");
    } else {
        if (paths.fixed.empty()) throw ConfigError("fixed path list is empty");
        paths.fixed.validate();
    }
    if (snr_points_db.empty()) throw ConfigError("snr_points_db must not be empty");
    for (double s : snr_points_db) {
        if (std::isnan(s) || s == -kNoiseless) throw ConfigError("snr points must be finite or +inf");
    }
    if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (methods.empty()) throw ConfigError("at least one method is required");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    EstimatorConfig est = estimator;
    est.n_paths = paths.count();
    est.validate();
}

void apply_config_entry(CampaignConfig& c, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    auto fixed_paths = [&c]() -> PathSet& {
        c.paths.random = false;
        return c.paths.fixed;
    };

    if (key == "n_subcarriers") c.grid.n_subcarriers = parse_int(key, value);
    else if (key == "n_symbols") c.grid.n_symbols = parse_int(key, value);
    else if (key == "occupancy") c.grid.occupancy = parse_double(key, value);
    else if (key == "pilot_spacing_freq") c.grid.pilot_spacing_freq = parse_int(key, value);
    else if (key == "pilot_spacing_time") c.grid.pilot_spacing_time = parse_int(key, value);
    else if (key == "tdd_gap_symbols") {
        c.grid.tdd_gap_symbols.clear();
        for (auto token : split_list(value)) c.grid.tdd_gap_symbols.insert(parse_int(key, token));
    }
    else if (key == "mask_seed") c.grid.seed = parse_seed(key, value);
    else if (key == "redraw_mask") c.redraw_mask = parse_bool(key, value);
    else if (key == "qam_order") c.modulation.qam_order = parse_int(key, value);
    else if (key == "eta") c.eta = parse_double(key, value);
    else if (key == "beta") c.beta = parse_double(key, value);
    else if (key == "n_paths") c.paths.n_paths = parse_int(key, value);
    else if (key == "gamma_min") c.paths.gamma_min = parse_double(key, value);
    else if (key == "gamma_max") c.paths.gamma_max = parse_double(key, value);
    else if (key == "min_separation_cells") c.paths.min_separation_cells = parse_double(key, value);
    else if (key == "path_taus") fixed_paths().taus = parse_doubles(key, value);
    else if (key == "path_alphas") fixed_paths().alphas = parse_doubles(key, value);
    else if (key == "path_gamma_re" || key == "path_gamma_im") {
        const auto parts = parse_doubles(key, value);
        auto& gammas = fixed_paths().gammas;
        gammas.resize(std::max(gammas.size(), parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (key == "path_gamma_re") gammas[i].real(parts[i]);
            else gammas[i].imag(parts[i]);
        }
    }
    else if (key == "snr_points_db") c.snr_points_db = parse_doubles(key, value);
    else if (key == "n_trials") c.n_trials = parse_int(key, value);
    else if (key == "seed") c.seed = parse_seed(key, value);
    else if (key == "methods") {
        c.methods.clear();
        for (auto token : split_list(value)) c.methods.push_back(parse_method(token));
    }
    else if (key == "crb") c.crb = parse_bool(key, value);
    else if (key == "threads") c.threads = parse_int(key, value);
    else if (key == "coarse_oversampling") c.estimator.coarse_oversampling = parse_int(key, value);
    else if (key == "lm_max_iters") c.estimator.lm_max_iters = parse_int(key, value);
    else if (key == "lm_tol") c.estimator.lm_tol = parse_double(key, value);
    else if (key == "lm_lambda0") c.estimator.lm_lambda0 = parse_double(key, value);
    else if (key == "lm_lambda_up") c.estimator.lm_lambda_up = parse_double(key, value);
    else if (key == "lm_lambda_down") c.estimator.lm_lambda_down = parse_double(key, value);
    else if (key == "residual_threshold") {
        if (value == "none" || value.empty()) c.estimator.residual_threshold.reset();
        else c.estimator.residual_threshold = parse_double(key, value);
    }
    else if (key == "final_joint_refine") c.estimator.final_joint_refine = parse_bool(key, value);
    else if (key == "joint_max_iters") c.estimator.joint_max_iters = parse_int(key, value);
    else throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

CampaignConfig parse_campaign_config(std::istream& in) {
    CampaignConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            apply_config_entry(config, view.substr(0, eq), view.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

CampaignConfig load_campaign_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_campaign_config(in);
}

PathSet draw_paths(const PathSpec& spec, int n_subcarriers, int n_symbols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PathSet paths;
    constexpr int kMaxAttempts = 10000;
    for (int p = 0; p < spec.n_paths; ++p) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const double tau = 1.0 - unit(rng);
            const double alpha = 0.5 - unit(rng);
            bool separated = true;
            for (int q = 0; q < paths.size() && separated; ++q) {
                separated = chebyshev_cells(tau, alpha, paths.taus[q], paths.alphas[q], n_subcarriers, n_symbols) >=
                            spec.min_separation_cells;
            }
            if (!separated) continue;
            const double magnitude = spec.gamma_min + (spec.gamma_max - spec.gamma_min) * unit(rng);
            const double phase = kTwoPi * unit(rng);
            paths.push_back(tau, alpha, std::polar(magnitude, phase));
            placed = true;
        }
        if (!placed) throw ConfigError("cannot place " + std::to_string(spec.n_paths) + " paths with the requested separation");
    }
    return paths;
}

TrialRealization make_trial(const CampaignConfig& config, int trial, double snr_db, std::size_t snr_index) {
    const auto t = static_cast<std::uint64_t>(trial);
    GridConfig grid = config.grid;
    if (config.redraw_mask) grid.seed = derive_seed(config.seed, stream::kMask, t);
    const AllocationMask mask = build_mask(grid);
    Frame frame = generate_frame(mask, config.modulation, config.eta, config.beta,
                                 derive_seed(config.seed, stream::kPayload, t));
    PathSet truth = config.paths.random
                        ? draw_paths(config.paths, grid.n_subcarriers, grid.n_symbols,
                                     derive_seed(config.seed, stream::kPaths, t))
                        : config.paths.fixed;
    const std::uint64_t noise_seed = derive_seed(derive_seed(config.seed, stream::kNoise, t), stream::kNoise, snr_index);
    Observation obs = observe(frame, truth, snr_db, noise_seed);
    return TrialRealization{std::move(frame), std::move(truth), std::move(obs)};
}

std::vector<int> min_cost_assignment(const RMat& cost) {
    const auto n = static_cast<int>(cost.rows());
    const auto m = static_cast<int>(cost.cols());
    if (n > m) throw std::invalid_argument("assignment needs rows <= cols");
    if (n == 0) return {};

    // Shortest augmenting path with potentials, 1-based internally.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (match[j] != 0) assignment[match[j] - 1] = j - 1;
    }
    return assignment;
}

PathErrors match_paths(const PathSet& truth, const PathSet& estimate) {
    if (estimate.size() < truth.size()) {
        throw std::invalid_argument("fewer estimated paths than true paths");
    }
    RMat cost(truth.size(), estimate.size());
    for (int i = 0; i < truth.size(); ++i) {
        for (int j = 0; j < estimate.size(); ++j) {
            const double dt = wrapped_difference(estimate.taus[j], truth.taus[i]);
            const double da = wrapped_difference(estimate.alphas[j], truth.alphas[i]);
            cost(i, j) = dt * dt + da * da;
        }
    }
    const auto assignment = min_cost_assignment(cost);
    PathErrors errors;
    for (int i = 0; i < truth.size(); ++i) {
        const int j = assignment[i];
        const double dt = wrapped_difference(estimate.taus[j], truth.taus[i]);
        const double da = wrapped_difference(estimate.alphas[j], truth.alphas[i]);
        errors.tau_sq.push_back(dt * dt);
        errors.alpha_sq.push_back(da * da);
    }
    return errors;
}

const MseRow& CampaignResult::row(double snr_db, Method method, std::string_view param) const {
    for (const auto& r : rows) {
        if (r.snr_db == snr_db && r.method == method && r.param == param) return r;
    }
    throw std::out_of_range("no MSE row for the requested point");
}

const TrialSeries& CampaignResult::trials(double snr_db, Method method) const {
    for (const auto& s : series) {
        if (s.snr_db == snr_db && s.method == method) return s;
    }
    throw std::out_of_range("no trial series for the requested point");
}

namespace {

struct MethodOutcome {
    double tau = kNaN;
    double alpha = kNaN;
};

struct TrialOutcome {
    std::vector<MethodOutcome> methods;
    double crb_tau = kNaN;
    double crb_alpha = kNaN;
};

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

PathSet run_method(Method method, const Observation& obs, const EstimatorConfig& cfg) {
    switch (method) {
        case Method::Weighted: return estimate(obs, cfg).paths;
        case Method::Unweighted: return unweighted_estimate(obs, cfg).paths;
        case Method::ZfDft: return dft_peak_estimate(zf_channel(obs).grid, cfg.n_paths, cfg.coarse_oversampling);
        case Method::MfDft: return dft_peak_estimate(mf_channel(obs), cfg.n_paths, cfg.coarse_oversampling);
    }
    return {};
}

TrialOutcome run_trial(const CampaignConfig& config, int trial, std::size_t snr_index) {
    const TrialRealization r = make_trial(config, trial, config.snr_points_db[snr_index], snr_index);
    TrialOutcome out;
    for (Method method : config.methods) {
        MethodOutcome mo;
        try {
            const PathErrors e = match_paths(r.truth, run_method(method, r.obs, config.estimator));
            mo.tau = mean_of(e.tau_sq);
            mo.alpha = mean_of(e.alpha_sq);
        } catch (const std::exception&) {
            // Counted as a failed trial for this method.
        }
        out.methods.push_back(mo);
    }
    if (config.crb) {
        try {
            const DeviceModel model(r.obs.mask);
            const CrbResult bound = crb(r.truth, r.obs.x_hat, r.obs.mask, model.axes(), r.obs.noise_var);
            double t = 0.0;
            double a = 0.0;
            for (int p = 0; p < r.truth.size(); ++p) {
                t += bound.tau(p);
                a += bound.alpha(p);
            }
            out.crb_tau = t / r.truth.size();
            out.crb_alpha = a / r.truth.size();
        } catch (const SingularityError&) {
        }
    }
    return out;
}

void summarize(const std::vector<double>& values, const std::vector<double>& crbs, MseRow& row) {
    double sum = 0.0;
    double sum_sq = 0.0;
    double crb_sum = 0.0;
    int crb_n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) {
            ++row.n_fail;
            continue;
        }
        ++row.n_ok;
        sum += values[i];
        sum_sq += values[i] * values[i];
        if (!std::isnan(crbs[i])) {
            crb_sum += crbs[i];
            ++crb_n;
        }
    }
    const double n = row.n_ok;
    row.mse = row.n_ok > 0 ? sum / n : kNaN;
    row.mse_stderr = row.n_ok > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) / n) : kNaN;
    row.crb = crb_n > 0 ? crb_sum / crb_n : kNaN;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& input) {
    CampaignConfig config = input;
    config.estimator.n_paths = config.paths.count();
    config.validate();

    const std::size_t n_snr = config.snr_points_db.size();
    const auto n_trials = static_cast<std::size_t>(config.n_trials);
    const std::size_t n_tasks = n_snr * n_trials;
    std::vector<TrialOutcome> outcomes(n_tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t task = next.fetch_add(1);
            if (task >= n_tasks) break;
            try {
                outcomes[task] = run_trial(config, static_cast<int>(task % n_trials), task / n_trials);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                            : std::max(1U, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    CampaignResult result;
    for (std::size_t s = 0; s < n_snr; ++s) {
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
            TrialSeries series;
            series.snr_db = config.snr_points_db[s];
            series.method = config.methods[m];
            for (std::size_t t = 0; t < n_trials; ++t) {
                const TrialOutcome& o = outcomes[s * n_trials + t];
                series.tau.push_back(o.methods[m].tau);
                series.alpha.push_back(o.methods[m].alpha);
                series.crb_tau.push_back(o.crb_tau);
                series.crb_alpha.push_back(o.crb_alpha);
            }
            MseRow tau_row{series.snr_db, series.method, "tau"};
            summarize(series.tau, series.crb_tau, tau_row);
            MseRow alpha_row{series.snr_db, series.method, "alpha"};
            summarize(series.alpha, series.crb_alpha, alpha_row);
            if (!config.crb) tau_row.crb = alpha_row.crb = kNaN;
            result.rows.push_back(tau_row);
            result.rows.push_back(alpha_row);
            result.series.push_back(std::move(series));
        }
    }
    return result;
}

void write_mse_csv(std::ostream& out, const CampaignResult& result) {
    out << "snr_db,method,param,mse,crb,n_ok,n_fail\n";
    for (const auto& r : result.rows) {
        out << io::format_double(r.snr_db) << ',' << method_name(r.method) << ',' << r.param << ','
            << io::format_double(r.mse) << ',' << io::format_double(r.crb) << ',' << r.n_ok << ',' << r.n_fail
            << '\n';
    }
}

std::string_view surface_name(SurfaceKind kind) {
    switch (kind) {
        case SurfaceKind::Ambiguity: return "af";
        case SurfaceKind::Weighted: return "weighted";
        case SurfaceKind::Unweighted: return "unweighted";
        case SurfaceKind::ZfDft: return "zf_dft";
        case SurfaceKind::MfDft: return "mf_dft";
    }
    return "unknown";
}

SurfaceKind parse_surface(std::string_view name) {
    name = trim(name);
    for (SurfaceKind k : {SurfaceKind::Ambiguity, SurfaceKind::Weighted, SurfaceKind::Unweighted,
                          SurfaceKind::ZfDft, SurfaceKind::MfDft}) {
        if (surface_name(k) == name) return k;
    }
    throw ConfigError("unknown surface '" + std::string(name) + "' (af, weighted, unweighted, zf_dft, mf_dft)");
}

namespace {

Eigen::Index nearest_index(const RVec& coords, double value) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < coords.size(); ++i) {
        if (std::abs(wrapped_difference(coords[i], value)) < std::abs(wrapped_difference(coords[best], value))) best = i;
    }
    return best;
}

void take_column(RVec& alphas, RMat& values, double alpha) {
    const Eigen::Index j = nearest_index(alphas, alpha);
    const RMat column = values.col(j);
    const double chosen = alphas[j];
    alphas = RVec::Constant(1, chosen);
    values = column;
}

}  // namespace

SurfaceExport compute_surface(const CampaignConfig& input, const SurfaceRequest& request) {
    CampaignConfig config = input;
    config.estimator.n_paths = config.paths.count();
    config.validate();
    if (request.oversampling < 1) throw ConfigError("oversampling must be >= 1");

    const TrialRealization r = make_trial(config, request.trial, request.snr_db);
    const DeviceModel model(r.obs.mask);
    const int lf = request.oversampling * model.n_subcarriers();
    const int lt = request.oversampling * model.n_symbols();

    SurfaceExport out;
    out.kind = request.kind;
    out.taus = delay_grid(lf);
    out.alphas = request.slice_alpha && (request.kind == SurfaceKind::Weighted || request.kind == SurfaceKind::Unweighted)
                     ? RVec::Constant(1, wrap_doppler(*request.slice_alpha))
                     : doppler_grid(lt);

    switch (request.kind) {
        case SurfaceKind::Ambiguity: {
            const Frame frame = request.pilots_only
                                    ? generate_frame(r.frame.mask, config.modulation, 0.0, config.beta,
                                                     derive_seed(config.seed, stream::kPayload, request.trial))
                                    : r.frame;
            out.values = ambiguity_function(frame, request.oversampling).values;
            break;
        }
        case SurfaceKind::Weighted:
            out.truth = r.truth;
            out.values = spreading_grid(model, r.obs.x_hat, r.obs.y, out.taus, out.alphas).cwiseAbs();
            if (request.with_estimate) out.estimate = estimate(r.obs, config.estimator).paths;
            break;
        case SurfaceKind::Unweighted: {
            out.truth = r.truth;
            const CVec h_zf = vectorize(r.obs.mask, zf_channel(r.obs).grid);
            out.values = model.correlate_grid(h_zf, out.taus, out.alphas).cwiseAbs();
            if (request.with_estimate) out.estimate = unweighted_estimate(r.obs, config.estimator).paths;
            break;
        }
        case SurfaceKind::ZfDft:
        case SurfaceKind::MfDft: {
            out.truth = r.truth;
            const CMat channel = request.kind == SurfaceKind::ZfDft ? zf_channel(r.obs).grid : mf_channel(r.obs);
            out.values = dft_spreading(channel, request.oversampling).values.cwiseAbs();
            if (request.with_estimate) {
                out.estimate = dft_peak_estimate(channel, config.estimator.n_paths, request.oversampling);
            }
            break;
        }
    }
    if (request.slice_alpha && out.alphas.size() != 1) take_column(out.alphas, out.values, *request.slice_alpha);

    const double peak = out.values.size() > 0 ? out.values.maxCoeff() : 0.0;
    if (peak > 0.0) out.values /= peak;
    return out;
}

void write_surface(std::ostream& out, const SurfaceExport& surface) {
    out << "# surface " << surface_name(surface.kind) << '\n';
    auto markers = [&out](const char* tag, const PathSet& paths) {
        for (int p = 0; p < paths.size(); ++p) {
            out << "# " << tag << ' ' << io::format_double(paths.taus[p]) << ' ' << io::format_double(paths.alphas[p])
                << ' ' << io::format_double(std::abs(paths.gammas[p])) << '\n';
        }
    };
    markers("true", surface.truth);
    if (surface.estimate) markers("estimate", *surface.estimate);
    out << "tau,alpha,value\n";
    for (Eigen::Index i = 0; i < surface.taus.size(); ++i) {
        for (Eigen::Index j = 0; j < surface.alphas.size(); ++j) {
            out << io::format_double(surface.taus[i]) << ',' << io::format_double(surface.alphas[j]) << ','
                << io::format_double(surface.values(i, j)) << '\n';
        }
    }
}

}  // namespace isacest
