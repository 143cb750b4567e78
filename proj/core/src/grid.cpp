// SPDX-License-Identifier: Apache-2.0
#include "isacest/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace isacest {

int GridConfig::quota() const {
    return static_cast<int>(std::round(occupancy * n_subcarriers));
}

void GridConfig::validate() const {
    if (n_subcarriers < 2) throw ConfigError("n_subcarriers must be >= 2");
    if (n_symbols < 2) throw ConfigError("n_symbols must be >= 2");
    if (!(occupancy > 0.0 && occupancy <= 1.0)) throw ConfigError("occupancy must be in (0, 1]");
    if (pilot_spacing_freq < 1) throw ConfigError("pilot_spacing_freq must be >= 1");
    if (pilot_spacing_time < 1) throw ConfigError("pilot_spacing_time must be >= 1");
    for (int s : tdd_gap_symbols) {
        if (s < 0 || s >= n_symbols) {
            throw ConfigError("tdd gap symbol " + std::to_string(s) + " outside 0.." +
                              std::to_string(n_symbols - 1));
        }
    }
    if (static_cast<int>(tdd_gap_symbols.size()) == n_symbols) {
        throw ConfigError("every symbol is a tdd gap: no usable resource elements");
    }
    if (quota() < 1) throw ConfigError("occupancy * n_subcarriers rounds to zero elements per symbol");
}

namespace {

void check_range(const std::vector<ResourceElement>& res, int n_sub, int n_sym, const char* what) {
    for (const auto& re : res) {
        if (re.symbol < 0 || re.symbol >= n_sym || re.subcarrier < 0 || re.subcarrier >= n_sub) {
            throw ConfigError(std::string(what) + " element (" + std::to_string(re.symbol) + ", " +
                              std::to_string(re.subcarrier) + ") outside the grid");
        }
    }
}

}  // namespace

AllocationMask::AllocationMask(int n_subcarriers, int n_symbols, std::uint64_t seed,
                               std::vector<ResourceElement> pilots,
                               std::vector<ResourceElement> data)
    : n_subcarriers_(n_subcarriers),
      n_symbols_(n_symbols),
      seed_(seed),
      pilots_(std::move(pilots)),
      data_(std::move(data)) {
    if (n_subcarriers < 1 || n_symbols < 1) throw ConfigError("mask dimensions must be positive");
    check_range(pilots_, n_subcarriers, n_symbols, "pilot");
    check_range(data_, n_subcarriers, n_symbols, "data");
    std::sort(pilots_.begin(), pilots_.end());
    std::sort(data_.begin(), data_.end());
    if (std::adjacent_find(pilots_.begin(), pilots_.end()) != pilots_.end() ||
        std::adjacent_find(data_.begin(), data_.end()) != data_.end()) {
        throw ConfigError("duplicate resource element in mask");
    }

    used_.reserve(pilots_.size() + data_.size());
    kinds_.reserve(pilots_.size() + data_.size());
    auto p = pilots_.begin();
    auto d = data_.begin();
    while (p != pilots_.end() || d != data_.end()) {
        if (d == data_.end() || (p != pilots_.end() && *p < *d)) {
            used_.push_back(*p++);
            kinds_.push_back(ReKind::Pilot);
        } else if (p == pilots_.end() || *d < *p) {
            used_.push_back(*d++);
            kinds_.push_back(ReKind::Data);
        } else {
            throw ConfigError("resource element (" + std::to_string(p->symbol) + ", " +
                              std::to_string(p->subcarrier) + ") is both pilot and data");
        }
    }
}

std::optional<int> AllocationMask::index_of(ResourceElement re) const {
    auto it = std::lower_bound(used_.begin(), used_.end(), re);
    if (it == used_.end() || *it != re) return std::nullopt;
    return static_cast<int>(it - used_.begin());
}

AllocationMask AllocationMask::data_only(int n_subcarriers, int n_symbols, std::uint64_t seed,
                                         std::vector<ResourceElement> used) {
    return AllocationMask(n_subcarriers, n_symbols, seed, {}, std::move(used));
}

AllocationMask build_mask(const GridConfig& config) {
    config.validate();
    const int quota = config.quota();

    std::vector<ResourceElement> pilots;
    std::vector<ResourceElement> data;
    std::mt19937_64 rng(config.seed);

    int active_index = 0;
    for (int s = 0; s < config.n_symbols; ++s) {
        if (config.tdd_gap_symbols.contains(s)) continue;
        const bool pilot_symbol = active_index++ % config.pilot_spacing_time == 0;

        std::vector<int> free;
        int n_pilots = 0;
        for (int c = 0; c < config.n_subcarriers; ++c) {
            if (pilot_symbol && c % config.pilot_spacing_freq == 0) {
                pilots.push_back({s, c});
                ++n_pilots;
            } else {
                free.push_back(c);
            }
        }
        if (n_pilots > quota) {
            throw ConfigError("symbol " + std::to_string(s) + " carries " + std::to_string(n_pilots) +
                              " pilots but the occupancy quota is " + std::to_string(quota));
        }
        std::shuffle(free.begin(), free.end(), rng);
        for (int i = 0; i < quota - n_pilots; ++i) data.push_back({s, free[i]});
    }
    return AllocationMask(config.n_subcarriers, config.n_symbols, config.seed, std::move(pilots),
                          std::move(data));
}

CVec vectorize(const AllocationMask& mask, const CMat& grid) {
    if (grid.rows() != mask.n_subcarriers() || grid.cols() != mask.n_symbols()) {
        throw DimensionError("grid is " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                             ", mask expects " + std::to_string(mask.n_subcarriers()) + "x" +
                             std::to_string(mask.n_symbols()));
    }
    const auto& used = mask.all_used();
    CVec out(static_cast<Eigen::Index>(used.size()));
    for (std::size_t i = 0; i < used.size(); ++i) out[i] = grid(used[i].subcarrier, used[i].symbol);
    return out;
}

CMat scatter(const AllocationMask& mask, const CVec& values) {
    if (values.size() != mask.n_used()) {
        throw DimensionError("vector has " + std::to_string(values.size()) + " entries, mask uses " +
                             std::to_string(mask.n_used()));
    }
    CMat grid = CMat::Zero(mask.n_subcarriers(), mask.n_symbols());
    const auto& used = mask.all_used();
    for (std::size_t i = 0; i < used.size(); ++i) grid(used[i].subcarrier, used[i].symbol) = values[i];
    return grid;
}

}  // namespace isacest
