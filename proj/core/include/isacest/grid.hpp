// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/types.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace isacest {

/// Time-frequency resource allocation parameters for one coherent block.
struct GridConfig {
    int n_subcarriers = 32;
    int n_symbols = 20;
    /// Fraction of subcarriers active on every non-gap symbol (pilots included).
    double occupancy = 0.4;
    int pilot_spacing_freq = 4;
    int pilot_spacing_time = 4;
    std::set<int> tdd_gap_symbols;
    std::uint64_t seed = 1;

    /// Active resource elements per non-gap symbol, rounded half away from zero.
    int quota() const;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

/// One (symbol, subcarrier) cell. The defaulted ordering is symbol-major,
/// which is the canonical vectorization order.
struct ResourceElement {
    int symbol = 0;
    int subcarrier = 0;

    friend auto operator<=>(const ResourceElement&, const ResourceElement&) = default;
};

enum class ReKind : std::uint8_t { Pilot, Data };

/// Which resource elements carry pilots or data. Everything not listed is empty.
class AllocationMask {
public:
    /// Sorts both sets canonically. Throws ConfigError on overlap, duplicates or
    /// out-of-range indices.
    AllocationMask(int n_subcarriers, int n_symbols, std::uint64_t seed,
                   std::vector<ResourceElement> pilots, std::vector<ResourceElement> data);

    int n_subcarriers() const noexcept { return n_subcarriers_; }
    int n_symbols() const noexcept { return n_symbols_; }
    std::uint64_t seed() const noexcept { return seed_; }

    const std::vector<ResourceElement>& pilots() const noexcept { return pilots_; }
    const std::vector<ResourceElement>& data() const noexcept { return data_; }
    /// Union of pilots and data in canonical order.
    const std::vector<ResourceElement>& all_used() const noexcept { return used_; }
    /// Kind of all_used()[i].
    const std::vector<ReKind>& kinds() const noexcept { return kinds_; }
    int n_used() const noexcept { return static_cast<int>(used_.size()); }

    /// Position of `re` in all_used(), if it is used.
    std::optional<int> index_of(ResourceElement re) const;

    /// Mask with the same used set where every element is a data element.
    static AllocationMask data_only(int n_subcarriers, int n_symbols, std::uint64_t seed,
                                    std::vector<ResourceElement> used);

    friend bool operator==(const AllocationMask&, const AllocationMask&) = default;

private:
    int n_subcarriers_;
    int n_symbols_;
    std::uint64_t seed_;
    std::vector<ResourceElement> pilots_;
    std::vector<ResourceElement> data_;
    std::vector<ResourceElement> used_;
    std::vector<ReKind> kinds_;
};

/// Regular pilot lattice on non-gap symbols plus seeded random data placement
/// until every non-gap symbol holds exactly `config.quota()` elements.
AllocationMask build_mask(const GridConfig& config);

/// Gathers `grid` (N_F x N_T) over the used set in canonical order.
CVec vectorize(const AllocationMask& mask, const CMat& grid);

/// Inverse of vectorize: zero-filled N_F x N_T grid.
CMat scatter(const AllocationMask& mask, const CVec& values);

}  // namespace isacest
