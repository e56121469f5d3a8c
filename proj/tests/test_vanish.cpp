#include <catch_amalgamated.hpp>

#include "lanekit/oracles.hpp"
#include "lanekit/road_profile.hpp"
#include "lanekit/vanish.hpp"

#include <cmath>
#include <random>

using namespace lanekit;

TEST_CASE("extended column axis", "[vanish]") {
    CHECK(extended_col_lo(0.5, 1242) == -621);
    CHECK(extended_col_count(0.5, 1242) == 2484);
    CHECK(extended_col_lo(0.3, 1242) == -373);
    CHECK(extended_col_count(0.3, 1242) == 1987);
    CHECK(extended_col_lo(0.0, 640) == 0);
    CHECK(extended_col_count(0.0, 640) == 640);
}

TEST_CASE("sparse votes follow the edge tangent", "[vanish]") {
    const VpyProfile vpy = vpy_profile({-75.0, 0.5, 0.0}, 400);  // constant 150

    EdgeSet edges;
    edges.pixels.push_back({100, 250, 0.5, 0.0, 0.0});    // vertical edge: stays at u
    edges.pixels.push_back({100, 250, 0.5, 0.5, 0.0});    // 45 degrees: walks 100 cols
    edges.pixels.push_back({100, 250, -0.4, 0.2, 0.0});   // negative slope
    edges.pixels.push_back({100, 250, 1e-4, 0.9, 0.0});   // near-horizontal: skipped
    edges.pixels.push_back({100, 399, 2.0, 2.0, 0.0});    // bottom row
    edges.pixels.push_back({10, 250, 0.1, -4.0, 0.0});    // flies past the left rail: clamped

    const SparseVpxMap sp = sparse_vpx(edges, vpy, 1e-3, 0.5, 400);
    CHECK(sp.ext_lo == -200);
    CHECK(sp.ext_cols == 800);
    REQUIRE(sp.votes.size() == 5);
    CHECK(sp.skipped == 1);
    CHECK(sp.votes[0].col == 100);
    CHECK(sp.votes[1].col == 100 + 100);
    CHECK(sp.votes[2].col == 100 + static_cast<int>(std::llround(100 * (0.2 / -0.4))));
    CHECK(sp.votes[3].col == 100 + 249);
    CHECK(sp.votes[4].col == -200);  // 10 + 140*(-40) clamps to the rail
}

TEST_CASE("sparse votes skip singular rows", "[vanish]") {
    VpyProfile vpy;
    vpy.value.assign(10, 5.0);
    vpy.singular.assign(10, 0);
    vpy.singular[4] = 1;
    EdgeSet edges;
    edges.pixels.push_back({3, 4, 1.0, 0.0, 0.0});   // singular row
    edges.pixels.push_back({3, 12, 1.0, 0.0, 0.0});  // outside the profile
    edges.pixels.push_back({3, 3, 1.0, 0.0, 0.0});   // fine
    const SparseVpxMap sp = sparse_vpx(edges, vpy, 1e-3, 0.0, 8);
    CHECK(sp.votes.size() == 1);
    CHECK(sp.skipped == 2);
}

TEST_CASE("vote bands per regime", "[vanish]") {
    using oracle::oracle_band_range;
    // growing regime at the bottom
    CHECK(oracle_band_range(95, 50, 100, 10).top == 95);
    CHECK(oracle_band_range(95, 50, 100, 10).bottom == 100);
    CHECK(oracle_band_range(90, 50, 100, 10).top == 90);
    // centred window in the middle
    CHECK(oracle_band_range(75, 50, 100, 10).top == 65);
    CHECK(oracle_band_range(75, 50, 100, 10).bottom == 85);
    // thinning against the horizon
    CHECK(oracle_band_range(55, 50, 100, 10).top == 50);
    CHECK(oracle_band_range(55, 50, 100, 10).bottom == 65);
    // a short range is all growing regime
    CHECK(oracle_band_range(52, 50, 54, 10).top == 52);
    CHECK(oracle_band_range(52, 50, 54, 10).bottom == 54);
}

TEST_CASE("dense accumulator equals brute-force band sums", "[vanish]") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 6; ++trial) {
        const int v_top = 10 + static_cast<int>(rng() % 5);
        const int v_max = v_top + 8 + static_cast<int>(rng() % 30);
        const int chi = static_cast<int>(rng() % 12);
        const Real rho_vote = 0.25 * (1 + static_cast<int>(rng() % 8));

        SparseVpxMap sp;
        sp.ext_lo = -6;
        sp.ext_cols = 20;
        const int n_votes = 40 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n_votes; ++i) {
            const int col = sp.ext_lo + static_cast<int>(rng() % sp.ext_cols);
            const int row = v_top + static_cast<int>(rng() % (v_max - v_top + 1));
            sp.votes.push_back({0, row, col});
        }

        const DenseVpxAccumulator acc = accumulate_dense_vpx(sp, v_top, v_max, chi, rho_vote);
        std::vector<std::pair<int, int>> pairs;
        for (const auto& v : sp.votes) pairs.emplace_back(v.col, v.v_e);
        for (int v = v_top; v <= v_max; ++v)
            for (int c = 0; c < sp.ext_cols; ++c) {
                const int u = sp.ext_lo + c;
                REQUIRE(acc.at(u, v) ==
                        oracle::oracle_band_sum(pairs, u, v, v_top, v_max, chi, rho_vote));
            }
    }
}

TEST_CASE("upath extraction equals enumeration", "[vanish]") {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<Real> cell(-9.0, 0.0);
    std::uniform_real_distribution<Real> lam(0.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        DenseVpxAccumulator acc;
        acc.ext_lo = -3;
        acc.ext_cols = 4 + static_cast<int>(rng() % 4);
        acc.v_top = 20;
        acc.v_max = 22 + static_cast<int>(rng() % 3);
        acc.chi = 5;
        acc.rho_vote = 1.0;
        acc.m.resize(static_cast<size_t>(acc.v_max - acc.v_top + 1) * acc.ext_cols);
        for (auto& x : acc.m) x = cell(rng);

        const Real lambda = lam(rng);
        const bool paper = (trial % 2 == 1);
        const DpPath path = dp_extract_upath(acc, lambda, paper);

        auto penalty = [&](int off) { return paper ? lambda * off : lambda * std::abs(off); };
        oracle::DpEnumInstance oi;
        oi.stages = acc.v_max - acc.v_top + 1;
        oi.states = acc.ext_cols;
        oi.data = [&](int stage, int s) { return acc.at(acc.ext_lo + s, acc.v_max - stage); };
        oi.offsets = {0, -1, 1, -2, 2, -3, 3, -4, 4, -5, 5};
        oi.penalty = penalty;
        const auto ref = oracle::oracle_dp_enumerate(oi);

        REQUIRE(path.energy == ref.energy);  // continuous data: unique optimum
        REQUIRE(path.points.size() == ref.path.size());
        for (size_t i = 0; i < ref.path.size(); ++i) {
            CHECK(path.points[i].first == acc.ext_lo + ref.path[i]);
            CHECK(path.points[i].second == acc.v_max - static_cast<int>(i));
        }
    }
}

TEST_CASE("upath evidence flag", "[vanish]") {
    DenseVpxAccumulator acc;
    acc.ext_lo = 0;
    acc.ext_cols = 5;
    acc.v_top = 0;
    acc.v_max = 3;
    acc.m.assign(20, 0.0);
    CHECK_FALSE(dp_extract_upath(acc, 1.0).has_evidence);
    acc.m[7] = -2.0;
    CHECK(dp_extract_upath(acc, 1.0).has_evidence);
}

TEST_CASE("quartic fit recovers exact coefficients", "[vanish]") {
    // gamma2 = 1/256 and rows at multiples of 80 keep every sample integral
    // in binary, so the REQUIRE below is exact rather than luck.
    const std::array<Real, 5> gamma{300.0, -1.0, 0.00390625, 0.0, 0.0};
    std::vector<std::pair<int, int>> pts;
    for (int v = 80; v <= 560; v += 80) {
        const Real u = gamma[0] + gamma[1] * v + gamma[2] * v * v;
        REQUIRE(u == std::floor(u));  // rows chosen so samples are integral
        pts.emplace_back(static_cast<int>(u), v);
    }
    const QuarticProfile q = fit_quartic(pts);
    CHECK(q.gamma[0] == Catch::Approx(300.0).margin(1e-6));
    CHECK(q.gamma[1] == Catch::Approx(-1.0).margin(1e-7));
    CHECK(q.gamma[2] == Catch::Approx(0.00390625).margin(1e-9));
    CHECK(q.gamma[3] == Catch::Approx(0.0).margin(1e-9));
    CHECK(q.gamma[4] == Catch::Approx(0.0).margin(1e-11));
    CHECK(q.v_normalizer == 560.0);

    CHECK_THROWS_AS(fit_quartic({{1, 1}, {2, 2}, {3, 3}, {4, 4}}), Error);
    CHECK_THROWS_AS(fit_quartic(pts, -1.0), Error);
}

TEST_CASE("quartic fit is kappa-invariant", "[vanish]") {
    std::mt19937_64 rng(515);
    std::uniform_real_distribution<Real> jit(-0.5, 0.5);
    std::vector<std::pair<int, int>> pts;
    for (int v = 90; v <= 360; v += 3) {
        const Real u = 320.0 - 0.8 * v + 0.002 * v * v + jit(rng);
        pts.emplace_back(static_cast<int>(std::llround(u)), v);
    }
    const QuarticProfile a = fit_quartic(pts, 1e-6);
    const QuarticProfile b = fit_quartic(pts, 1.0);
    const QuarticProfile c = fit_quartic(pts, 1e6);
    for (int k = 0; k < 5; ++k) {
        const Real scale = std::max({Real(1), std::abs(a.gamma[k])});
        CHECK(std::abs(a.gamma[k] - b.gamma[k]) <= 1e-9 * scale);
        CHECK(std::abs(b.gamma[k] - c.gamma[k]) <= 1e-9 * scale);
    }
}

TEST_CASE("quartic fit survives large row indices", "[vanish]") {
    const std::array<Real, 5> gamma{300.0, -0.5, 1e-4, -1e-8, 1e-12};
    std::vector<std::pair<int, int>> pts;
    for (int v = 0; v <= 4096; v += 64) {
        Real u = 0, vk = 1;
        for (int k = 0; k < 5; ++k) {
            u += gamma[k] * vk;
            vk *= v;
        }
        pts.emplace_back(static_cast<int>(std::llround(u)), v);
    }
    const QuarticProfile q = fit_quartic(pts);
    for (int k = 0; k < 5; ++k) CHECK(std::isfinite(q.gamma[k]));
    Real worst = 0;
    for (const auto& [u, v] : pts)
        worst = std::max(worst, std::abs(u - q.eval(static_cast<Real>(v))));
    CHECK(worst < 1.0);  // within quantization error of the samples
}

TEST_CASE("ransac gamma survives outliers", "[vanish]") {
    std::mt19937_64 rng(626);
    std::uniform_real_distribution<Real> jit(-0.5, 0.5);
    std::uniform_int_distribution<int> wild(-300, 900);
    const std::array<Real, 5> gamma{280.0, -0.6, 0.0015, 0.0, 0.0};

    std::vector<std::pair<int, int>> pts;
    for (int v = 100; v < 356; ++v) {
        const Real u = gamma[0] + gamma[1] * v + gamma[2] * v * v + jit(rng);
        pts.emplace_back(static_cast<int>(std::llround(u)), v);
    }
    const size_t clean = pts.size();
    for (size_t i = 0; i < clean / 4; ++i)
        pts.emplace_back(wild(rng), 100 + static_cast<int>(rng() % 256));

    RansacConfig rc;
    rc.tolerance = 16.0;
    rc.inlier_fraction = 0.7;
    rc.sample_size = 5;
    rc.rng_seed = 3;
    const GammaResult g = ransac_gamma(pts, rc);
    CHECK_FALSE(g.degraded);
    Real worst = 0;
    for (int v = 100; v < 356; ++v) {
        const Real truth = gamma[0] + gamma[1] * v + gamma[2] * v * v;
        worst = std::max(worst, std::abs(truth - g.profile.eval(static_cast<Real>(v))));
    }
    CHECK(worst <= 3.0);
}

TEST_CASE("vpx profile evaluates the quartic per row", "[vanish]") {
    QuarticProfile q;
    q.gamma = {5.0, 1.0, -0.5, 0.25, -0.125};
    const auto prof = vpx_profile(q, 4);
    REQUIRE(prof.size() == 4);
    for (int v = 0; v < 4; ++v) {
        const Real vv = v;
        const Real direct =
            5.0 + 1.0 * vv - 0.5 * vv * vv + 0.25 * vv * vv * vv - 0.125 * vv * vv * vv * vv;
        CHECK(prof[v] == Catch::Approx(direct).margin(1e-12));
    }
}
