#include <doctest.h>

#include <random>

#include "seislabel/curvelet.hpp"

using namespace seislabel;

namespace {

PatchImage random_patch(int rows, int cols, std::uint64_t seed) {
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    PatchImage img(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) img(r, c) = uni(rng);
    return img;
}

// Pixels on a 1/256 lattice so small dyadic linear combinations are exact in
// float arithmetic.
PatchImage dyadic_patch(int rows, int cols, std::uint64_t seed) {
    auto rng = make_rng(seed, 0);
    std::uniform_int_distribution<int> lattice(0, 255);
    PatchImage img(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) img(r, c) = lattice(rng) / 256.0f;
    return img;
}

double image_energy(const PatchImage& img) {
    double e = 0.0;
    for (int r = 0; r < img.rows(); ++r)
        for (int c = 0; c < img.cols(); ++c) e += static_cast<double>(img(r, c)) * img(r, c);
    return e;
}

}  // namespace

TEST_CASE("scale count follows the dyadic rule on the short dimension") {
    CHECK(num_scales(99, 99) == 4);
    CHECK(num_scales(64, 64) == 3);
    CHECK(num_scales(128, 64) == 3);
    CHECK(num_scales(64, 128) == 3);
    CHECK(num_scales(128, 128) == 4);
    CHECK(num_scales(16, 16) == 1);
    CHECK(num_scales(17, 17) == 2);
    CHECK_THROWS_AS(num_scales(15, 64), DataError);
    CHECK_THROWS_AS(num_scales(64, 15), DataError);
}

TEST_CASE("orientation counts double every other scale") {
    CHECK(num_orientations(0) == 1);
    CHECK(num_orientations(1) == 16);
    CHECK(num_orientations(2) == 32);
    CHECK(num_orientations(3) == 32);
    CHECK(num_orientations(4) == 64);
    CHECK(num_orientations(5) == 64);
    CHECK(num_orientations(6) == 128);
    CHECK_THROWS_AS(num_orientations(-1), ConfigError);
}

TEST_CASE("squared windows sum to one at every frequency bin") {
    const int sizes[][2] = {{16, 16}, {17, 17}, {20, 24}, {32, 32},
                            {33, 47}, {64, 64}, {64, 32}, {99, 99}};
    for (auto [n1, n2] : sizes) {
        CAPTURE(n1);
        CAPTURE(n2);
        FrequencyTiling tiling(n1, n2);
        double worst = 0.0;
        for (int a1 = 0; a1 < n1; ++a1)
            for (int a2 = 0; a2 < n2; ++a2) {
                int k1 = a1 <= (n1 - 1) / 2 ? a1 : a1 - n1;
                int k2 = a2 <= (n2 - 1) / 2 ? a2 : a2 - n2;
                worst = std::max(worst, std::abs(tiling.window_energy_at(k1, k2) - 1.0));
            }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("tiling counts for the reference sizes") {
    struct Expect {
        int n, scales, retained;
    } cases[] = {{64, 3, 25}, {99, 4, 41}, {128, 4, 41}};
    for (auto [n, scales, retained] : cases) {
        CAPTURE(n);
        FrequencyTiling tiling(n, n);
        CHECK(tiling.scales() == scales);
        CHECK(tiling.retained_count() == retained);
        CHECK(tiling.orientations(0) == 1);
        int full = 0, kept = 0;
        for (std::size_t i = 0; i < tiling.wedges().size(); ++i) {
            ++full;
            if (tiling.retained(i)) ++kept;
        }
        CHECK(kept == retained);
        int expect_full = 1;
        for (int j = 1; j < scales; ++j) expect_full += num_orientations(j);
        CHECK(full == expect_full);
    }
}

TEST_CASE("retained wedges cover scale zero plus half of each annulus") {
    FrequencyTiling tiling(64, 64);
    for (std::size_t i = 0; i < tiling.wedges().size(); ++i) {
        const Wedge& w = tiling.wedges()[i];
        bool expect = w.scale == 0 || w.orientation < tiling.orientations(w.scale) / 2;
        CHECK(tiling.retained(i) == expect);
    }
}

TEST_CASE("constant patch concentrates in the coarsest wedge") {
    CurveletTransform xf(64, 64);
    PatchImage img = PatchImage::Constant(64, 64, 0.75f);
    CurveletCoeffs coeffs = xf.forward(img);
    REQUIRE(static_cast<int>(coeffs.coeffs.size()) == xf.tiling().retained_count());
    double total = coeffs.total_energy();
    CHECK(total == doctest::Approx(0.75 * 0.75 * 64 * 64).epsilon(1e-9));
    double fine = 0.0;
    for (std::size_t i = 0; i < coeffs.coeffs.size(); ++i)
        if (xf.tiling().wedges()[coeffs.wedge_index[i]].scale > 0)
            fine += coeffs.wedge_energy(i);
    CHECK(fine < 1e-10 * total);
}

TEST_CASE("wedge energies reproduce the image energy") {
    for (int n : {64, 99}) {
        CAPTURE(n);
        CurveletTransform xf(n, n);
        for (int trial = 0; trial < 5; ++trial) {
            PatchImage img = random_patch(n, n, 100 + trial);
            CurveletCoeffs coeffs = xf.forward(img);
            double direct = image_energy(img);
            CHECK(coeffs.total_energy() ==
                  doctest::Approx(direct).epsilon(1e-6));
        }
    }
}

TEST_CASE("energy is preserved on non-square patches too") {
    CurveletTransform xf(48, 64);
    PatchImage img = random_patch(48, 64, 7);
    CurveletCoeffs coeffs = xf.forward(img);
    CHECK(coeffs.total_energy() == doctest::Approx(image_energy(img)).epsilon(1e-6));
}

TEST_CASE("global brightness scaling scales every coefficient") {
    CurveletTransform xf(32, 32);
    PatchImage img = dyadic_patch(32, 32, 21);
    PatchImage half = 0.5f * img;
    CurveletCoeffs a = xf.forward(img);
    CurveletCoeffs b = xf.forward(half);
    REQUIRE(a.coeffs.size() == b.coeffs.size());
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        double diff = (b.coeffs[i] - 0.5 * a.coeffs[i]).norm();
        CHECK(diff <= 1e-12 * (1.0 + a.coeffs[i].norm()));
    }
}

TEST_CASE("the transform is linear wedge-wise") {
    CurveletTransform xf(33, 33);
    PatchImage x = dyadic_patch(33, 33, 31);
    PatchImage y = dyadic_patch(33, 33, 32);
    const float a = 0.5f, b = 0.25f;
    PatchImage z = a * x + b * y;  // exact in float on the dyadic lattice
    CurveletCoeffs cx = xf.forward(x);
    CurveletCoeffs cy = xf.forward(y);
    CurveletCoeffs cz = xf.forward(z);
    for (std::size_t i = 0; i < cz.coeffs.size(); ++i) {
        Eigen::MatrixXcd combo = a * cx.coeffs[i] + b * cy.coeffs[i];
        double err = (cz.coeffs[i] - combo).norm();
        CHECK(err <= 1e-10 * (1.0 + combo.norm()));
    }
}

TEST_CASE("coefficient grids match the wedge bounding boxes") {
    CurveletTransform xf(64, 64);
    PatchImage img = random_patch(64, 64, 3);
    CurveletCoeffs coeffs = xf.forward(img);
    for (std::size_t i = 0; i < coeffs.coeffs.size(); ++i) {
        const Wedge& w = xf.tiling().wedges()[coeffs.wedge_index[i]];
        CHECK(coeffs.coeffs[i].rows() == w.win.rows());
        CHECK(coeffs.coeffs[i].cols() == w.win.cols());
    }
}

TEST_CASE("forward transform rejects mismatched patch sizes") {
    CurveletTransform xf(32, 32);
    CHECK_THROWS_AS(xf.forward(random_patch(32, 48, 1)), DataError);
    CHECK_THROWS_AS(xf.forward(random_patch(48, 32, 1)), DataError);
}

TEST_CASE("transforms of the same patch are reproducible") {
    CurveletTransform xf(32, 32);
    PatchImage img = random_patch(32, 32, 5);
    CurveletCoeffs a = xf.forward(img);
    CurveletCoeffs b = xf.forward(img);
    REQUIRE(a.coeffs.size() == b.coeffs.size());
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        CHECK(a.coeffs[i] == b.coeffs[i]);
}
