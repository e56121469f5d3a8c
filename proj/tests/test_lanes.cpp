#include <catch_amalgamated.hpp>

#include "lanekit/lanes.hpp"

#include <cmath>
#include <random>

using namespace lanekit;

namespace {

VpProfile constant_vp(Real vpx, Real vpy, int v_top, int v_max) {
    VpProfile vp;
    vp.v_top = v_top;
    vp.v_max = v_max;
    vp.vpx.assign(v_max + 1, vpx);
    vp.vpy.assign(v_max + 1, vpy);
    return vp;
}

}  // namespace

TEST_CASE("orientation weight", "[lanes]") {
    const Real sg = 3.5;
    CHECK(piecewise_weight(0.3, 0.3, sg) == 1.0);
    CHECK(piecewise_weight(kPi / 6, 0.0, sg) ==
          Catch::Approx(std::exp(-6.0 / 12.25)).margin(1e-12));
    CHECK(piecewise_weight(kPi / 6 + 0.01, 0.0, sg) == 0.0);
    CHECK(piecewise_weight(2.0, 0.0, sg) == 0.0);
    // orientations live mod pi: opposite directions are the same line
    CHECK(piecewise_weight(kPi, 0.0, sg) == 1.0);
    CHECK(piecewise_weight(0.2, 0.2 + kPi, sg) == Catch::Approx(1.0).margin(1e-12));
    // symmetric in its arguments
    CHECK(piecewise_weight(0.4, 0.1, sg) == piecewise_weight(0.1, 0.4, sg));
}

TEST_CASE("m0 box-gathers weighted edges", "[lanes]") {
    GradientField grad;
    grad.gx = GrayImage(12, 10, 0);
    grad.gy = GrayImage(12, 10, 0);
    grad.magnitude = GrayImage(12, 10, 0);
    grad.theta = GrayImage(12, 10, 0);
    const VpProfile vp = constant_vp(6.0, -100.0, 2, 9);

    SECTION("single interior edge spreads over the box") {
        EdgeSet edges;
        // ray to the vp from (6, 6) is straight up; tangent of a vertical
        // edge (theta = 0 gradient) matches it exactly
        edges.pixels.push_back({6, 6, 0.8, 0.0, 0.0});
        const GrayImage m0 = build_m0(grad, edges, vp, 1, 3, 3.5);

        const Real dx = 6.0 - 6.0, dy = -100.0 - 6.0;
        const Real w = piecewise_weight(0.0 + kPi / 2, std::atan2(dy, dx), 3.5);
        CHECK(w == 1.0);
        for (int v = 0; v < 10; ++v)
            for (int u = 0; u < 12; ++u) {
                const Real want = (std::abs(u - 6) <= 1 && std::abs(v - 6) <= 3) ? 0.8 * w : 0.0;
                CHECK(m0.at(u, v) == Catch::Approx(want).margin(1e-12));
            }
    }

    SECTION("rows without a vanishing point contribute nothing") {
        EdgeSet edges;
        edges.pixels.push_back({6, 1, 0.8, 0.0, 0.0});  // above v_top
        const GrayImage m0 = build_m0(grad, edges, vp, 1, 3, 3.5);
        for (const Real x : m0.data) CHECK(x == 0.0);
    }

    SECTION("randomised against a direct per-pixel gather") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<Real> g(-1.0, 1.0);
        EdgeSet edges;
        for (int v = 0; v < 10; ++v)
            for (int u = 0; u < 12; ++u) {
                if (rng() % 3) continue;  // sparse, one edge per pixel at most
                const Real gx = g(rng), gy = g(rng);
                edges.pixels.push_back({u, v, gx, gy, std::atan2(gy, gx)});
            }
        const int nu = 2, varsigma = 1;
        const GrayImage m0 = build_m0(grad, edges, vp, nu, varsigma, 3.5);
        for (int v = 0; v < 10; ++v)
            for (int u = 0; u < 12; ++u) {
                Real want = 0;
                for (const auto& e : edges.pixels) {
                    if (std::abs(e.u - u) > nu || std::abs(e.v - v) > varsigma) continue;
                    if (!vp.defined(e.v)) continue;
                    const Real dx = vp.vpx[e.v] - e.u;
                    const Real dy = vp.vpy[e.v] - e.v;
                    want += e.gx * piecewise_weight(e.theta + kPi / 2, std::atan2(dy, dx), 3.5);
                }
                CHECK(m0.at(u, v) == Catch::Approx(want).margin(1e-9));
            }
    }

    CHECK_THROWS_AS(build_m0(grad, EdgeSet{}, vp, -1, 3, 3.5), Error);
}

TEST_CASE("m1 response stencil", "[lanes]") {
    SECTION("constant input gives zero response") {
        const GrayImage m1 = build_m1(GrayImage(9, 7, 4.25));
        for (const Real x : m1.data) CHECK(x == 0.0);
    }

    SECTION("impulse reproduces the stencil") {
        GrayImage m0(9, 7, 0);
        m0.at(4, 3) = 1.0;
        const GrayImage m1 = build_m1(m0);
        for (int v = 0; v < 7; ++v)
            for (int u = 0; u < 9; ++u) {
                Real want = 0;
                if (u == 3 && std::abs(v - 3) <= 1) want = (v == 3) ? 2.0 : 1.0;
                if (u == 5 && std::abs(v - 3) <= 1) want = (v == 3) ? -2.0 : -1.0;
                CHECK(m1.at(u, v) == want);
            }
    }

    SECTION("border ring stays zero") {
        std::mt19937_64 rng(7);
        GrayImage m0(8, 6, 0);
        for (auto& x : m0.data) x = static_cast<Real>(rng() % 100) / 10;
        const GrayImage m1 = build_m1(m0);
        for (int u = 0; u < 8; ++u) {
            CHECK(m1.at(u, 0) == 0.0);
            CHECK(m1.at(u, 5) == 0.0);
        }
        for (int v = 0; v < 6; ++v) {
            CHECK(m1.at(0, v) == 0.0);
            CHECK(m1.at(7, v) == 0.0);
        }
    }

    CHECK_THROWS_AS(build_m1(GrayImage(2, 5, 0)), Error);
}

TEST_CASE("lane tracks head for the vanishing point", "[lanes]") {
    SECTION("constant vanishing point makes straight lines") {
        const VpProfile vp = constant_vp(317.0, 88.5, 100, 239);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<Real> ub(-50.0, 700.0);
        for (int trial = 0; trial < 10; ++trial) {
            const Real u0 = ub(rng);
            const auto track = lane_track(u0, vp);
            REQUIRE(track.size() == 140);
            CHECK(track.back() == u0);
            for (int i = 0; i < 140; ++i) {
                REQUIRE(!std::isnan(track[i]));
                // collinear with (vpx, vpy) and the bottom anchor
                const Real v = 100.0 + i;
                const Real cross = (track[i] - 317.0) * (239.0 - 88.5) - (u0 - 317.0) * (v - 88.5);
                CHECK(std::abs(cross) <= 1e-6 * std::max<Real>(1.0, std::abs(u0 - 317.0)));
            }
        }
    }

    SECTION("seeding at the vanishing column is an exact fixed point") {
        const VpProfile vp = constant_vp(400.0, 150.0, 160, 300);
        const auto track = lane_track(400.0, vp);
        for (const Real u : track) CHECK(u == 400.0);
    }

    SECTION("rows truncate when the vanishing point collapses onto them") {
        VpProfile vp = constant_vp(50.0, 0.0, 10, 20);
        for (int v = 0; v <= 20; ++v) vp.vpy[v] = 15.2;
        const auto track = lane_track(30.0, vp);
        for (int v = 20; v >= 15; --v) CHECK(!std::isnan(track[v - 10]));
        for (int v = 14; v >= 10; --v) CHECK(std::isnan(track[v - 10]));
    }

    VpProfile bad;
    bad.v_top = 5;
    bad.v_max = 4;
    CHECK_THROWS_AS(lane_track(0.0, bad), Error);
}

TEST_CASE("energy aggregation along tracks", "[lanes]") {
    // vanishing point pushed far above the frame: tracks are vertical columns
    const VpProfile vp = constant_vp(8.0, -1e9, 2, 9);

    SECTION("uniform response counts the rows") {
        const GrayImage m1(16, 10, -1.0);
        const EnergyHistogram hist = aggregate_energy(m1, vp, 0.5, 1.0);
        CHECK(hist.ext_lo == -8);
        REQUIRE(hist.h.size() == 32);
        for (int ci = 0; ci < 32; ++ci) {
            const int col = hist.ext_lo + ci;
            const Real want = (col >= 0 && col < 16) ? -8.0 : 0.0;
            CHECK(hist.h[ci] == Catch::Approx(want).margin(1e-12));
        }
    }

    SECTION("decay weights rows by distance from the horizon") {
        GrayImage m1(16, 10, 0.0);
        for (int u = 0; u < 16; ++u) m1.at(u, 3) = -1.0;  // one row below v_top
        const EnergyHistogram hist = aggregate_energy(m1, vp, 0.0, 0.5);
        REQUIRE(hist.h.size() == 16);
        for (const Real e : hist.h) CHECK(e == Catch::Approx(-0.5).margin(1e-12));
    }

    SECTION("thread count does not change the histogram") {
        GrayImage m1(16, 10, 0.0);
        std::mt19937_64 rng(3);
        for (auto& x : m1.data) x = -static_cast<Real>(rng() % 1000) / 100;
        const EnergyHistogram a = aggregate_energy(m1, vp, 0.5, 0.9, 1);
        const EnergyHistogram b = aggregate_energy(m1, vp, 0.5, 0.9, 4);
        REQUIRE(a.h == b.h);
    }

    CHECK_THROWS_AS(aggregate_energy(GrayImage{}, vp, 0.5, 1.0), Error);
}

TEST_CASE("lane selection picks suppressed minima", "[lanes]") {
    const VpProfile vp = constant_vp(3.0, -1e9, 2, 9);
    EnergyHistogram hist;
    hist.ext_lo = 0;
    hist.h = {0, -5, 0, -3, 0, -10, 0};

    SECTION("greedy suppression drops close seconds") {
        const LaneSet set = select_lanes(hist, -1.0, 3, vp);
        REQUIRE(set.lanes.size() == 2);
        CHECK(set.lanes[0].bottom_col == 5);
        CHECK(set.lanes[0].energy == -10.0);
        CHECK(set.lanes[1].bottom_col == 1);
        CHECK(set.lanes[1].energy == -5.0);
        // polyline covers the whole defined range, rows ascending
        REQUIRE(set.lanes[0].polyline.size() == 8);
        CHECK(set.lanes[0].polyline.front().first == 2);
        CHECK(set.lanes[0].polyline.back().first == 9);
        CHECK(set.lanes[0].polyline.back().second == Catch::Approx(5.0).margin(1e-9));
    }

    SECTION("wider spacing keeps all three") {
        const LaneSet set = select_lanes(hist, -1.0, 2, vp);
        REQUIRE(set.lanes.size() == 3);
        CHECK(set.lanes[2].bottom_col == 3);
    }

    SECTION("threshold filters weak minima") {
        const LaneSet set = select_lanes(hist, -6.0, 2, vp);
        REQUIRE(set.lanes.size() == 1);
        CHECK(set.lanes[0].bottom_col == 5);
    }

    SECTION("boundary bins and plateaus are not minima") {
        EnergyHistogram edge;
        edge.ext_lo = 0;
        edge.h = {-100, -5, -5, -100};
        CHECK(select_lanes(edge, -1.0, 2, vp).lanes.empty());
    }
}

TEST_CASE("automatic selection threshold", "[lanes]") {
    GrayImage m1(10, 10, 0.0);
    for (int v = 2; v <= 9; ++v)
        for (int u = 0; u < 10; ++u) m1.at(u, v) = (v % 2) ? 2.0 : -2.0;
    m1.at(5, 5) = 100.0;  // a single spike the percentile must ignore

    // 80 samples: index floor(0.99*79) = 78 picks the last plain cell
    CHECK(auto_lane_threshold(m1, 2, 9) == Catch::Approx(-0.15 * 8 * 2.0).margin(1e-12));
    CHECK_THROWS_AS(auto_lane_threshold(m1, 9, 2), Error);
}
