#include "doctest.h"

#include "splatguard/error.hpp"
#include "splatguard/perturb.hpp"
#include "splatguard/wavelet.hpp"
#include "support.hpp"

using namespace splatguard;
using testing::random_image;

namespace {

// Replaces every k x k block (clipped at the border) with its mean.
Image block_mean(const Image& img, int k) {
    Image out(img.width(), img.height());
    for (int c = 0; c < 3; ++c) {
        for (int by = 0; by < img.height(); by += k) {
            for (int bx = 0; bx < img.width(); bx += k) {
                double s = 0;
                int n = 0;
                for (int y = by; y < std::min(by + k, img.height()); ++y)
                    for (int x = bx; x < std::min(bx + k, img.width()); ++x, ++n) s += img.at(c, x, y);
                for (int y = by; y < std::min(by + k, img.height()); ++y)
                    for (int x = bx; x < std::min(bx + k, img.width()); ++x) out.set(c, x, y, s / n);
            }
        }
    }
    return out;
}

double sum_sq(const Plane& p) {
    double s = 0;
    for (double v : p.data) s += v * v;
    return s;
}

} // namespace

TEST_CASE("haar: coefficients of a single 2x2 block") {
    Plane p(2, 2);
    p.at(0, 0) = 1;
    p.at(1, 0) = 2;
    p.at(0, 1) = 3;
    p.at(1, 1) = 4;
    const SubbandSet s = haar_forward(p);
    CHECK(s.ll.at(0, 0) == doctest::Approx(5.0));
    CHECK(s.lh.at(0, 0) == doctest::Approx(-2.0));
    CHECK(s.hl.at(0, 0) == doctest::Approx(-1.0));
    CHECK(s.hh.at(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("haar: perfect reconstruction and energy preservation on even sizes") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Image img = random_image(12 + 2 * static_cast<int>(seed), 10, seed);
        const Decomposition d = dwt2(img);
        CHECK(max_abs_diff(idwt2(d), img) < 1e-12);
        for (int c = 0; c < 3; ++c) {
            const double coeff = sum_sq(d[c].ll) + sum_sq(d[c].lh) + sum_sq(d[c].hl) + sum_sq(d[c].hh);
            CHECK(coeff == doctest::Approx(sum_sq(img.plane_copy(c))).epsilon(1e-12));
        }
    }
}

TEST_CASE("haar: odd sizes pad by replication and crop back") {
    const Image img = random_image(7, 5, 3);
    const Decomposition d = dwt2(img);
    CHECK(d[0].ll.width == 4);
    CHECK(d[0].ll.height == 3);
    CHECK(d[0].orig_width == 7);
    CHECK(d[0].orig_height == 5);
    const Image back = idwt2(d);
    CHECK(back.width() == 7);
    CHECK(back.height() == 5);
    CHECK(max_abs_diff(back, img) < 1e-12);
    // The padded last column duplicates column 6, so HL is zero there.
    for (int y = 0; y < 3; ++y) CHECK(d[1].hl.at(3, y) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("filter: equals 2x2 block mean, also on odd sizes") {
    for (auto [w, h] : {std::pair{8, 8}, std::pair{9, 6}, std::pair{5, 7}, std::pair{2, 2}}) {
        const Image img = random_image(w, h, static_cast<std::uint64_t>(w * h));
        CHECK(max_abs_diff(filter_high_freq(img), block_mean(img, 2)) < 1e-12);
    }
}

TEST_CASE("filter: deeper levels equal larger block means on divisible sizes") {
    const Image img = random_image(16, 8, 21);
    CHECK(max_abs_diff(filter_high_freq(img, 2), block_mean(img, 4)) < 1e-12);
    CHECK(max_abs_diff(filter_high_freq(img, 3), block_mean(img, 8)) < 1e-12);
    CHECK_THROWS_AS(filter_high_freq(img, 0), Error);
}

TEST_CASE("filter: idempotent and fixes constant images") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Image img = random_image(11, 9, seed);
        const Image once = filter_high_freq(img);
        CHECK(max_abs_diff(filter_high_freq(once), once) < 1e-12);
    }
    const Image flat(6, 4, 0.3);
    CHECK(max_abs_diff(filter_high_freq(flat), flat) < 1e-15);
}

TEST_CASE("filter: parallel kernels match the serial reference") {
    const Image img = random_image(37, 23, 5);
    const Decomposition a = dwt2(img);
    const Decomposition b = reference::dwt2(img);
    for (int c = 0; c < 3; ++c)
        for (int band = 0; band < 4; ++band)
            CHECK(a[c].band(static_cast<Subband>(band)).data == b[c].band(static_cast<Subband>(band)).data);
    CHECK(idwt2(a) == reference::idwt2(b));
    CHECK(filter_high_freq(img) == reference::filter_high_freq(img));
}

TEST_CASE("checker perturbation: invisible to the filter and bounded by epsilon") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Image img = random_image(13, 10, seed);
        const double eps = 16.0 / 255.0;
        const Image p = perturb(img, PerturbMode::Checker, eps, seed);
        CHECK(max_abs_diff(p, img) <= eps + 1e-15);
        CHECK(max_abs_diff(filter_high_freq(p), filter_high_freq(img)) < 1e-12);
        for (int c = 0; c < 3; ++c) {
            for (int y = 0; y < 10; ++y) CHECK(p.at(c, 12, y) == img.at(c, 12, y));
        }
    }
    const Image bright(4, 4, 1.0);
    CHECK(perturb(bright, PerturbMode::Checker, 0.1, 0) == bright);
}

TEST_CASE("uniform perturbation: bounded, seeded, view-dependent") {
    const Image img(10, 10, 0.5);
    const Image a = perturb(img, PerturbMode::Uniform, 0.05, 1);
    CHECK(max_abs_diff(a, img) <= 0.05);
    CHECK(max_abs_diff(a, img) > 0.0);
    CHECK(a == perturb(img, PerturbMode::Uniform, 0.05, 1));
    CHECK(!(a == perturb(img, PerturbMode::Uniform, 0.05, 2)));
    const Image v0 = perturb(img, PerturbMode::PerViewIndependent, 0.05, 1, 0);
    const Image v1 = perturb(img, PerturbMode::PerViewIndependent, 0.05, 1, 1);
    CHECK(!(v0 == v1));
    CHECK(perturb(img, PerturbMode::Uniform, 0.0, 1) == img);
    CHECK_THROWS_AS(perturb(img, PerturbMode::Uniform, 1.5, 1), Error);
    CHECK(perturb_mode_from_string("per-view-independent") == PerturbMode::PerViewIndependent);
    CHECK_THROWS_AS(perturb_mode_from_string("gauss"), Error);
}

TEST_CASE("energy: fractions sum to one and smooth images concentrate in LL") {
    const EnergyReport r = energy_report(testing::smooth_image(32, 32));
    for (int c = 0; c < 3; ++c) {
        CHECK(r.per_channel[c][0] + r.per_channel[c][1] + r.per_channel[c][2] + r.per_channel[c][3] ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(r.mean[0] > 0.99);

    // A pure checkerboard has all of its energy in HH.
    Image checker(8, 8);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) checker.set(c, x, y, (x + y) % 2 ? 0.0 : 1.0);
    const EnergyReport h = energy_report(checker);
    CHECK(h.mean[0] == doctest::Approx(0.5));
    CHECK(h.mean[3] == doctest::Approx(0.5));
    CHECK(h.mean[1] == doctest::Approx(0.0));
}

TEST_CASE("energy: zero channels are excluded, all-zero images rejected") {
    Image img = Image::from_planes(4, 4, {std::vector<double>(16, 0.0), std::vector<double>(16, 0.5),
                                          std::vector<double>(16, 0.0)});
    const EnergyReport r = energy_report(img);
    CHECK(r.channel_zero[0]);
    CHECK(!r.channel_zero[1]);
    CHECK(r.mean[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(energy_report(Image(4, 4, 0.0)), Error);
}

TEST_CASE("subband visualization: per-channel min-max, constant maps to 0.5") {
    const Decomposition d = dwt2(random_image(10, 8, 9));
    const SubbandVisualization v = subband_to_image(gather_band(d, Subband::LH));
    CHECK(v.image.width() == 5);
    CHECK(v.image.height() == 4);
    for (int c = 0; c < 3; ++c) {
        const auto plane = v.image.plane(c);
        CHECK(*std::min_element(plane.begin(), plane.end()) == 0.0);
        CHECK(*std::max_element(plane.begin(), plane.end()) == doctest::Approx(1.0));
        CHECK(v.min[c] < v.max[c]);
    }
    const Decomposition flat = dwt2(Image(6, 6, 0.4));
    const SubbandVisualization f = subband_to_image(gather_band(flat, Subband::HH));
    CHECK(f.image == Image(3, 3, 0.5));
    CHECK(subband_to_image(gather_band(dwt2(Image(3, 5)), Subband::LL)).image.width() == 2);
    CHECK_THROWS_AS(subband_to_image(gather_band(dwt2(Image(2, 5)), Subband::LL)), Error);
}
