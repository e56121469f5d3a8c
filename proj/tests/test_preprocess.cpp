#include <catch_amalgamated.hpp>

#include "lanekit/oracles.hpp"
#include "lanekit/preprocess.hpp"
#include "lanekit/road_profile.hpp"

#include "helpers.hpp"

#include <cmath>

using namespace lanekit;

TEST_CASE("bilateral filter equals the direct sum", "[preprocess]") {
    const GrayImage img = testkit::random_image(55, 13, 9);
    for (const auto& [sigma_s, sigma_r, rho] :
         {std::tuple{2.0, 0.1, 2}, std::tuple{5.0, 0.4, 3}, std::tuple{1.5, 0.05, 5}}) {
        const GrayImage out = bilateral_filter(img, sigma_s, sigma_r, rho);
        for (int v = 0; v < img.height; ++v)
            for (int u = 0; u < img.width; ++u)
                CHECK(out.at(u, v) ==
                      Catch::Approx(oracle::oracle_bilateral(img, u, v, sigma_s, sigma_r, rho))
                          .margin(1e-9));
    }
}

TEST_CASE("bilateral filter is thread-count invariant", "[preprocess]") {
    const GrayImage img = testkit::random_image(56, 33, 21);
    const GrayImage a = bilateral_filter(img, 3.0, 0.2, 3, 1);
    const GrayImage b = bilateral_filter(img, 3.0, 0.2, 3, 4);
    REQUIRE(a.data == b.data);
}

TEST_CASE("bilateral with a flat range kernel is a plain gaussian", "[preprocess]") {
    const GrayImage img = testkit::random_image(57, 11, 8);
    const Real sigma_s = 2.5;
    const int rho = 3;
    const GrayImage out = bilateral_filter(img, sigma_s, 1e12, rho);
    for (int v = 0; v < img.height; ++v)
        for (int u = 0; u < img.width; ++u) {
            Real num = 0, den = 0;
            for (int j = v - rho; j <= v + rho; ++j)
                for (int i = u - rho; i <= u + rho; ++i) {
                    const Real w = std::exp(-(Real(i - u) * (i - u) + Real(j - v) * (j - v)) /
                                            (sigma_s * sigma_s));
                    num += w * img.at(reflect_index(i, img.width), reflect_index(j, img.height));
                    den += w;
                }
            CHECK(out.at(u, v) == Catch::Approx(num / den).margin(1e-6));
        }
}

TEST_CASE("bilateral keeps a thin bright line that a median erases", "[preprocess]") {
    GrayImage img(15, 9, 0.1);
    for (int v = 0; v < img.height; ++v) img.at(7, v) = 0.9;  // one-pixel stripe
    const GrayImage bf = bilateral_filter(img, 2.0, 0.1, 1);
    const GrayImage med = oracle::oracle_median_filter(img, 1);
    // the median collapses the line to the background, the bilateral keeps
    // most of its height
    CHECK(med.at(7, 4) == Catch::Approx(0.1).margin(1e-12));
    CHECK(bf.at(7, 4) > 0.6);
    // both leave the flat background alone
    CHECK(bf.at(2, 4) == Catch::Approx(0.1).margin(1e-9));
}

TEST_CASE("sobel on an ideal vertical step", "[preprocess]") {
    const Real h = 0.2;
    GrayImage img(8, 6, 0);
    for (int v = 0; v < 6; ++v)
        for (int u = 4; u < 8; ++u) img.at(u, v) = h;

    const GradientField g = sobel_gradients(img);
    for (int v = 0; v < 6; ++v) {
        CHECK(g.gx.at(3, v) == Catch::Approx(4 * h).margin(1e-12));
        CHECK(g.gx.at(4, v) == Catch::Approx(4 * h).margin(1e-12));
        CHECK(g.gx.at(1, v) == Catch::Approx(0.0).margin(1e-12));
        CHECK(g.gy.at(3, v) == Catch::Approx(0.0).margin(1e-12));
        CHECK(g.magnitude.at(3, v) == Catch::Approx(4 * h).margin(1e-12));
        CHECK(g.theta.at(3, v) == Catch::Approx(0.0).margin(1e-12));  // dark-to-light
    }

    // flipped step: gradient points the other way, theta lands on +pi
    GrayImage flipped(8, 6, 0);
    for (int v = 0; v < 6; ++v)
        for (int u = 0; u < 4; ++u) flipped.at(u, v) = h;
    const GradientField gf = sobel_gradients(flipped);
    CHECK(gf.gx.at(3, 2) == Catch::Approx(-4 * h).margin(1e-12));
    CHECK(gf.theta.at(3, 2) == Catch::Approx(kPi).margin(1e-12));
}

TEST_CASE("sobel borders are mirrored and theta stays in (-pi, pi]", "[preprocess]") {
    const GrayImage flat(9, 7, 0.37);
    const GradientField g = sobel_gradients(flat);
    for (const Real x : g.magnitude.data) CHECK(x == 0.0);

    const GrayImage img = testkit::random_image(58, 17, 11);
    const GradientField gr = sobel_gradients(img);
    for (const Real t : gr.theta.data) {
        CHECK(t > -kPi);
        CHECK(t <= kPi);
    }
    CHECK_THROWS_AS(sobel_gradients(GrayImage(2, 2, 0.0)), Error);
}

TEST_CASE("edge map applies threshold and mask", "[preprocess]") {
    const Real h = 0.2;
    GrayImage img(10, 8, 0);
    for (int v = 0; v < 8; ++v)
        for (int u = 5; u < 10; ++u) img.at(u, v) = h;
    const GradientField g = sobel_gradients(img);

    Mask mask(10, 8, 1);
    for (int u = 0; u < 10; ++u) mask.at(u, 0) = 0;  // first row masked out

    const EdgeSet strong = edge_map(g, 4 * h - 1e-9, mask);
    for (const auto& e : strong.pixels) {
        CHECK((e.u == 4 || e.u == 5));
        CHECK(e.v != 0);
        CHECK(e.theta == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK(strong.pixels.size() == 2 * 7);

    // raising the threshold can only shrink the edge set
    const EdgeSet weak = edge_map(g, 0.01, mask);
    CHECK(weak.pixels.size() >= strong.pixels.size());
    const EdgeSet none = edge_map(g, 10.0, mask);
    CHECK(none.pixels.empty());

    Mask wrong(3, 3, 1);
    CHECK_THROWS_AS(edge_map(g, 0.1, wrong), Error);
}

TEST_CASE("road mask selects pixels near the fitted profile", "[preprocess]") {
    const RoadProfile road = make_road_profile({-50.0, 0.5, 0.0}, 300);
    REQUIRE(road.horizon == 100);

    DisparityMap disp(4, 300, 0);
    disp.at(0, 200) = 50;   // exactly on the profile
    disp.at(1, 200) = 53;   // within varpi = 3
    disp.at(2, 200) = 54;   // outside
    disp.at(3, 200) = 0;    // invalid
    disp.at(0, 99) = 0;
    disp.at(1, 99) = 1;     // above the horizon: excluded even if close

    const Mask mask = road_mask(disp, road, 3.0);
    CHECK(mask.at(0, 200) == 1);
    CHECK(mask.at(1, 200) == 1);
    CHECK(mask.at(2, 200) == 0);
    CHECK(mask.at(3, 200) == 0);
    CHECK(mask.at(0, 99) == 0);
    CHECK(mask.at(1, 99) == 0);
}
