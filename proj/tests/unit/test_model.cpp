// SPDX-License-Identifier: Apache-2.0
#include "isacest/model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace isacest;

namespace {

PathSet random_paths(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> tau(0.02, 0.98);
    std::uniform_real_distribution<double> alpha(-0.48, 0.48);
    std::normal_distribution<double> g;
    PathSet p;
    for (int i = 0; i < n; ++i) p.push_back(tau(rng), alpha(rng), {g(rng), g(rng)});
    return p;
}

CVec random_symbols(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    CVec x(n);
    for (int i = 0; i < n; ++i) x[i] = cplx(g(rng), g(rng));
    return x;
}

}  // namespace

TEST_CASE("axes are the integer subcarrier and symbol indices") {
    const auto ax = SamplingAxes::for_grid(5, 3);
    CHECK(ax.f == RVec::LinSpaced(5, 0.0, 4.0));
    CHECK(ax.t == RVec::LinSpaced(3, 0.0, 2.0));
}

TEST_CASE("full steering array is rank one with unit-modulus entries") {
    const auto ax = SamplingAxes::for_grid(16, 10);
    const CMat a = steering_full(0.37, -0.21, ax);
    CHECK((a.array().abs() - 1.0).abs().maxCoeff() < 1e-14);
    Eigen::JacobiSVD<CMat> svd(a);
    const RVec sv = svd.singularValues();
    CHECK(sv[0] == doctest::Approx(std::sqrt(160.0)).epsilon(1e-12));
    CHECK(sv[1] < 1e-12 * sv[0]);
    for (int n = 0; n < 10; ++n)
        for (int k = 0; k < 16; ++k) CHECK(std::abs(a(k, n) - oracle::steering_entry(k, n, 0.37, -0.21)) < 1e-13);
}

TEST_CASE("masked steering vector properties") {
    const auto mask = build_mask(GridConfig{});
    const DeviceModel m(mask);
    const double tau = 0.4375;
    const double alpha = 0.17;
    const CVec a = m.steering(tau, alpha);

    CHECK(a.squaredNorm() == doctest::Approx(mask.n_used()).epsilon(1e-12));
    CHECK((a - steering(tau, alpha, mask, SamplingAxes::for_grid(32, 20))).norm() == 0.0);
    CHECK((m.steering(1.0, 0.0).array() - cplx(1.0, 0.0)).abs().maxCoeff() < 1e-12);

    // a(t1, a1) .* a(t2, a2) = a(t1 + t2, a1 + a2)
    const CVec b = m.steering(0.2, -0.05);
    CHECK((a.cwiseProduct(b) - m.steering(tau + 0.2, alpha - 0.05)).norm() < 1e-11);
    // conjugation flips both parameters
    CHECK((a.conjugate() - m.steering(-tau, -alpha)).norm() < 1e-11);
    // unit periodicity under the integer axes
    CHECK((a - m.steering(tau + 1.0, alpha - 1.0)).norm() < 1e-10);
}

TEST_CASE("signal and channel agree with direct summation") {
    std::mt19937_64 rng(8);
    const auto mask = build_mask(GridConfig{});
    const DeviceModel m(mask);
    const PathSet p = random_paths(rng, 3);
    const CVec x = random_symbols(rng, mask.n_used());
    const CVec expected = oracle::received(mask, x, p);
    CHECK((m.signal(p, x) - expected).norm() < 1e-12 * expected.norm());
    CHECK((m.channel(p).cwiseProduct(x) - expected).norm() < 1e-12 * expected.norm());
    CHECK((signal_model(p, x, mask, m.axes()) - expected).norm() < 1e-12 * expected.norm());
    CHECK_THROWS_AS(signal_model(p, CVec::Ones(3), mask, m.axes()), DimensionError);
}

TEST_CASE("jacobian matches central differences") {
    std::mt19937_64 rng(12);
    const auto mask = build_mask(GridConfig{});
    const DeviceModel m(mask);
    for (int draw = 0; draw < 20; ++draw) {
        const int n_paths = 1 + draw % 4;
        const PathSet p = random_paths(rng, n_paths);
        const CVec x = random_symbols(rng, mask.n_used());
        const CMat jac = m.jacobian(p, x);
        REQUIRE(jac.cols() == 4 * n_paths);
        const double h = 1e-6;
        for (int col = 0; col < 4 * n_paths; ++col) {
            const int q = col % n_paths;
            auto shifted = [&](double d) {
                PathSet s = p;
                switch (col / n_paths) {
                    case 0: s.taus[q] += d; break;
                    case 1: s.alphas[q] += d; break;
                    case 2: s.gammas[q] += cplx(d, 0.0); break;
                    default: s.gammas[q] += cplx(0.0, d); break;
                }
                return oracle::received(mask, x, s);
            };
            const CVec fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            CHECK((jac.col(col) - fd).norm() / fd.norm() < 1e-5);
        }
    }
}

TEST_CASE("correlate_grid matches the direct sum") {
    std::mt19937_64 rng(2);
    const auto mask = build_mask(GridConfig{});
    const DeviceModel m(mask);
    const CVec w = random_symbols(rng, mask.n_used());
    const CVec ones = CVec::Ones(mask.n_used());
    const RVec taus = delay_grid(24);
    const RVec alphas = doppler_grid(13);
    const CMat g = m.correlate_grid(w, taus, alphas);
    REQUIRE(g.rows() == 24);
    REQUIRE(g.cols() == 13);
    double worst = 0.0;
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 13; ++j)
            worst = std::max(worst, std::abs(g(i, j) - oracle::spreading(mask, ones, w, taus[i], alphas[j])));
    CHECK(worst < 1e-10 * w.norm() * std::sqrt(mask.n_used()));
}

TEST_CASE("coarse grid coordinates") {
    const RVec d = delay_grid(4);
    CHECK(d[0] == doctest::Approx(0.25));
    CHECK(d[3] == doctest::Approx(1.0));
    const RVec even = doppler_grid(4);
    CHECK(even[0] == doctest::Approx(-0.25));
    CHECK(even[3] == doctest::Approx(0.5));
    const RVec odd = doppler_grid(5);
    CHECK(odd[0] == doctest::Approx(-0.4));
    CHECK(odd[2] == doctest::Approx(0.0));
    CHECK(odd[4] == doctest::Approx(0.4));
    for (int L : {1, 2, 7, 80, 128}) {
        const RVec a = doppler_grid(L);
        CHECK(a.minCoeff() > -0.5);
        CHECK(a.maxCoeff() <= 0.5);
        const RVec t = delay_grid(L);
        CHECK(t.minCoeff() > 0.0);
        CHECK(t.maxCoeff() <= 1.0);
    }
}
