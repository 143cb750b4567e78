// SPDX-License-Identifier: Apache-2.0
#include "isacest/txgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

using namespace isacest;

namespace {

double mean_power(const std::vector<cplx>& pts) {
    double s = 0.0;
    for (auto p : pts) s += std::norm(p);
    return s / static_cast<double>(pts.size());
}

}  // namespace

TEST_CASE("QPSK is (+-1 +-j)/sqrt(2)") {
    const auto pts = make_constellation({4});
    REQUIRE(pts.size() == 4);
    const double r = 1.0 / std::sqrt(2.0);
    for (auto p : pts) {
        CHECK(std::abs(std::abs(p.real()) - r) < 1e-15);
        CHECK(std::abs(std::abs(p.imag()) - r) < 1e-15);
    }
}

TEST_CASE("16-QAM corner magnitude matches brute-force normalization") {
    // Unnormalized lattice {-3,-1,1,3}^2, mean power by direct summation.
    double acc = 0.0;
    for (int i : {-3, -1, 1, 3})
        for (int q : {-3, -1, 1, 3}) acc += i * i + q * q;
    const double expected_corner = std::abs(cplx(3, 3)) / std::sqrt(acc / 16.0);
    CHECK(expected_corner == doctest::Approx(3.0 * std::sqrt(2.0) / std::sqrt(10.0)).epsilon(1e-15));

    const auto pts = make_constellation({16});
    double largest = 0.0;
    for (auto p : pts) largest = std::max(largest, std::abs(p));
    CHECK(largest == doctest::Approx(expected_corner).epsilon(1e-14));
}

TEST_CASE("every supported order is distinct, unit power and Gray mapped") {
    for (int order : {4, 16, 64, 256}) {
        const auto pts = make_constellation({order});
        REQUIRE(static_cast<int>(pts.size()) == order);
        CHECK(std::abs(mean_power(pts) - 1.0) < 1e-12);
        std::set<std::pair<double, double>> unique;
        for (auto p : pts) unique.insert({p.real(), p.imag()});
        CHECK(static_cast<int>(unique.size()) == order);

        // nearest neighbours differ in exactly one bit
        const double d_min = 2.0 / std::sqrt(2.0 * (order - 1) / 3.0);
        for (int a = 0; a < order; ++a) {
            for (int b = a + 1; b < order; ++b) {
                if (std::abs(std::abs(pts[a] - pts[b]) - d_min) < 1e-9) {
                    CHECK(std::popcount(static_cast<unsigned>(a ^ b)) == 1);
                }
            }
        }
    }
}

TEST_CASE("unsupported order") {
    CHECK_THROWS_AS(make_constellation({8}), ConfigError);
    CHECK_THROWS_AS(make_constellation({1024}), ConfigError);
}

TEST_CASE("frame invariants") {
    const auto mask = build_mask(GridConfig{});
    const auto pts = make_constellation({256});
    const double eta = 0.45;
    const double beta = 0.9;
    const Frame f = generate_frame(mask, {256}, eta, beta, 11);

    for (int s = 0; s < 20; ++s)
        for (int c = 0; c < 32; ++c)
            if (!mask.index_of({s, c})) CHECK(f.grid(c, s) == cplx(0.0, 0.0));
    for (const auto& re : mask.pilots()) CHECK(std::abs(f.grid(re.subcarrier, re.symbol)) == doctest::Approx(beta).epsilon(1e-15));
    for (const auto& re : mask.data()) {
        const cplx v = f.grid(re.subcarrier, re.symbol) / eta;
        const bool on_alphabet =
            std::any_of(pts.begin(), pts.end(), [&](cplx m) { return std::abs(m - v) < 1e-12; });
        CHECK(on_alphabet);
    }
}

TEST_CASE("eta = 0 leaves only the pilots") {
    const auto mask = build_mask(GridConfig{});
    const Frame f = generate_frame(mask, {256}, 0.0, 0.9, 5);
    for (const auto& re : mask.data()) CHECK(f.grid(re.subcarrier, re.symbol) == cplx(0.0, 0.0));
    for (const auto& re : mask.pilots()) CHECK(std::abs(f.grid(re.subcarrier, re.symbol)) > 0.0);
}

TEST_CASE("data power converges to eta^2 with beta = 0") {
    GridConfig cfg;
    cfg.n_subcarriers = 512;
    cfg.n_symbols = 256;
    cfg.occupancy = 1.0;
    cfg.pilot_spacing_freq = 64;
    cfg.pilot_spacing_time = 64;
    const auto mask = build_mask(cfg);
    REQUIRE(mask.data().size() >= 100000);

    const double eta = 0.99;
    const Frame f = generate_frame(mask, {256}, eta, 0.0, 17);
    for (const auto& re : mask.pilots()) CHECK(f.grid(re.subcarrier, re.symbol) == cplx(0.0, 0.0));

    // Oracle: per-RE power variance from direct enumeration of the alphabet.
    const auto pts = make_constellation({256});
    double m2 = 0.0;
    for (auto p : pts) m2 += std::pow(std::norm(p), 2);
    m2 /= 256.0;
    const double var = (m2 - 1.0) * std::pow(eta, 4);
    const double n = static_cast<double>(mask.data().size());
    double sum = 0.0;
    for (const auto& re : mask.data()) sum += std::norm(f.grid(re.subcarrier, re.symbol));
    const double sample_mean = sum / n;
    CHECK(std::abs(sample_mean - eta * eta) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("generation is deterministic and pilots ignore the payload seed") {
    const auto mask = build_mask(GridConfig{});
    const Frame a = generate_frame(mask, {256}, 0.45, 0.9, 21);
    const Frame b = generate_frame(mask, {256}, 0.45, 0.9, 21);
    const Frame c = generate_frame(mask, {256}, 0.45, 0.9, 22);
    CHECK(a.grid == b.grid);
    for (const auto& re : mask.pilots()) CHECK(a.grid(re.subcarrier, re.symbol) == c.grid(re.subcarrier, re.symbol));
    CHECK(a.grid != c.grid);
}

TEST_CASE("amplitude weights outside [0, 1) are rejected") {
    const auto mask = build_mask(GridConfig{});
    CHECK_THROWS_AS(generate_frame(mask, {256}, 1.0, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(generate_frame(mask, {256}, 0.5, -0.1, 1), ConfigError);
}
