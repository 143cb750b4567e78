// SPDX-License-Identifier: Apache-2.0
#include "isacest/io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace isacest::io {

std::string format_double(double value) {
    std::ostringstream os;
    os << std::setprecision(17) << value;
    return os.str();
}

namespace {

// Next line that is neither blank nor a `#` comment.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        return true;
    }
    return false;
}

std::istringstream expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!next_line(in, line)) throw FormatError(std::string("unexpected end of input, expected ") + what);
    return std::istringstream(line);
}

void expect_keyword(std::istringstream& ls, const char* keyword) {
    std::string word;
    if (!(ls >> word) || word != keyword) {
        throw FormatError(std::string("expected '") + keyword + "' header, found '" + word + "'");
    }
}

template <typename T>
T read_value(std::istringstream& ls, const char* what) {
    T v{};
    if (!(ls >> v)) throw FormatError(std::string("could not read ") + what);
    return v;
}

void write_mask_block(std::ostream& out, const AllocationMask& mask) {
    out << "mask " << mask.n_subcarriers() << ' ' << mask.n_symbols() << ' ' << mask.seed() << '\n';
    for (const auto& re : mask.pilots()) out << "P " << re.symbol << ' ' << re.subcarrier << '\n';
    for (const auto& re : mask.data()) out << "D " << re.symbol << ' ' << re.subcarrier << '\n';
    out << "end\n";
}

void expect_element(std::istringstream& ls, const ResourceElement& expected) {
    const int s = read_value<int>(ls, "symbol index");
    const int c = read_value<int>(ls, "subcarrier index");
    if (s != expected.symbol || c != expected.subcarrier) {
        throw FormatError("element (" + std::to_string(s) + ", " + std::to_string(c) +
                          ") out of canonical order; expected (" + std::to_string(expected.symbol) + ", " +
                          std::to_string(expected.subcarrier) + ")");
    }
}

}  // namespace

void write_mask(std::ostream& out, const AllocationMask& mask) {
    write_mask_block(out, mask);
}

AllocationMask read_mask(std::istream& in) {
    auto header = expect_line(in, "mask header");
    expect_keyword(header, "mask");
    const int n_sub = read_value<int>(header, "N_F");
    const int n_sym = read_value<int>(header, "N_T");
    const auto seed = read_value<std::uint64_t>(header, "seed");

    std::vector<ResourceElement> pilots;
    std::vector<ResourceElement> data;
    std::string line;
    while (true) {
        if (!next_line(in, line)) throw FormatError("mask block is missing its 'end' line");
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "end") break;
        ResourceElement re{read_value<int>(ls, "symbol index"), read_value<int>(ls, "subcarrier index")};
        if (tag == "P") {
            pilots.push_back(re);
        } else if (tag == "D") {
            data.push_back(re);
        } else {
            throw FormatError("unknown mask line tag '" + tag + "'");
        }
    }
    try {
        return AllocationMask(n_sub, n_sym, seed, std::move(pilots), std::move(data));
    } catch (const ConfigError& e) {
        throw FormatError(std::string("invalid mask: ") + e.what());
    }
}

void write_frame(std::ostream& out, const Frame& frame) {
    out << "frame " << format_double(frame.eta) << ' ' << format_double(frame.beta) << '\n';
    write_mask_block(out, frame.mask);
    for (const auto& re : frame.mask.all_used()) {
        const cplx x = frame.grid(re.subcarrier, re.symbol);
        out << re.symbol << ' ' << re.subcarrier << ' ' << format_double(x.real()) << ' '
            << format_double(x.imag()) << '\n';
    }
    out << "end\n";
}

Frame read_frame(std::istream& in) {
    auto header = expect_line(in, "frame header");
    expect_keyword(header, "frame");
    const double eta = read_value<double>(header, "eta");
    const double beta = read_value<double>(header, "beta");
    AllocationMask mask = read_mask(in);

    CMat grid = CMat::Zero(mask.n_subcarriers(), mask.n_symbols());
    for (const auto& re : mask.all_used()) {
        auto ls = expect_line(in, "frame element");
        expect_element(ls, re);
        const double real = read_value<double>(ls, "real part");
        const double imag = read_value<double>(ls, "imaginary part");
        grid(re.subcarrier, re.symbol) = cplx(real, imag);
    }
    auto tail = expect_line(in, "frame 'end'");
    expect_keyword(tail, "end");
    return Frame{std::move(grid), std::move(mask), eta, beta};
}

void write_observation(std::ostream& out, const Observation& obs) {
    out << "observation " << obs.mask.n_subcarriers() << ' ' << obs.mask.n_symbols() << ' ' << obs.mask.n_used()
        << ' ' << format_double(obs.noise_var) << '\n';
    const auto& used = obs.mask.all_used();
    for (std::size_t i = 0; i < used.size(); ++i) {
        out << used[i].symbol << ' ' << used[i].subcarrier << ' ' << format_double(obs.y[i].real()) << ' '
            << format_double(obs.y[i].imag()) << ' ' << format_double(obs.x_hat[i].real()) << ' '
            << format_double(obs.x_hat[i].imag()) << '\n';
    }
}

Observation read_observation(std::istream& in, const AllocationMask* mask) {
    auto header = expect_line(in, "observation header");
    expect_keyword(header, "observation");
    const int n_sub = read_value<int>(header, "N_F");
    const int n_sym = read_value<int>(header, "N_T");
    const int n_used = read_value<int>(header, "N_U");
    const double noise_var = read_value<double>(header, "noise_var");
    if (n_used < 0) throw FormatError("negative N_U");

    std::vector<ResourceElement> used;
    used.reserve(static_cast<std::size_t>(n_used));
    CVec y(n_used);
    CVec x(n_used);
    for (int i = 0; i < n_used; ++i) {
        auto ls = expect_line(in, "observation element");
        ResourceElement re{read_value<int>(ls, "symbol index"), read_value<int>(ls, "subcarrier index")};
        if (!used.empty() && !(used.back() < re)) throw FormatError("observation elements are not in canonical order");
        used.push_back(re);
        const double yr = read_value<double>(ls, "y real part");
        const double yi = read_value<double>(ls, "y imaginary part");
        const double xr = read_value<double>(ls, "x real part");
        const double xi = read_value<double>(ls, "x imaginary part");
        y[i] = cplx(yr, yi);
        x[i] = cplx(xr, xi);
    }

    if (mask != nullptr) {
        if (mask->n_subcarriers() != n_sub || mask->n_symbols() != n_sym || mask->all_used() != used) {
            throw FormatError("observation does not match the supplied mask");
        }
        Observation obs{std::move(y), std::move(x), *mask, noise_var};
        obs.validate();
        return obs;
    }
    try {
        Observation obs{std::move(y), std::move(x), AllocationMask::data_only(n_sub, n_sym, 0, std::move(used)),
                        noise_var};
        obs.validate();
        return obs;
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid observation: ") + e.what());
    }
}

void write_report(std::ostream& out, const EstimationReport& report) {
    out << "report " << report.paths.size() << '\n';
    out << "observation_energy " << format_double(report.observation_energy) << '\n';
    out << "final_residual_energy " << format_double(report.final_residual_energy) << '\n';
    out << "residual_energy";
    for (double e : report.residual_energy) out << ' ' << format_double(e);
    out << '\n';
    for (int p = 0; p < report.paths.size(); ++p) {
        const auto& trace = report.cost_trace[p];
        out << "path " << p + 1 << " tau " << format_double(report.paths.taus[p]) << " alpha "
            << format_double(report.paths.alphas[p]) << " gamma_re " << format_double(report.paths.gammas[p].real())
            << " gamma_im " << format_double(report.paths.gammas[p].imag()) << " converged "
            << (report.converged[p] ? 1 : 0) << " accepted_steps " << (trace.empty() ? 0 : trace.size() - 1)
            << '\n';
    }
    if (!report.joint_cost_trace.empty()) {
        out << "joint_refine converged " << (report.joint_converged ? 1 : 0) << " accepted_steps "
            << report.joint_cost_trace.size() - 1 << " final_cost " << format_double(report.joint_cost_trace.back())
            << '\n';
    }
}

}  // namespace isacest::io
