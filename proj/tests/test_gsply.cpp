#include "doctest.h"

#include "fixtures.hpp"
#include "splatguard/error.hpp"
#include "splatguard/gsply.hpp"

#include <cmath>

using namespace splatguard;
using testing::ascii_ply;
using testing::binary_ply;
using testing::cloud_from_scales;
using testing::random_cloud;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no splatguard::Error thrown");
    return ErrorKind::IoError;
}

double nu_oracle(const std::array<double, 3>& s) {
    const double m = (s[0] + s[1] + s[2]) / 3.0;
    double v = 0.0;
    for (double x : s) v += (x - m) * (x - m);
    return v / 2.0 / (m * m);
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

} // namespace

TEST_CASE("ply: binary round trip is exact, ascii is within float text precision") {
    const GaussianCloud c = random_cloud(25, 4);
    const GaussianCloud b = parse_gaussian_ply(binary_ply(c));
    const GaussianCloud a = parse_gaussian_ply(ascii_ply(c));
    REQUIRE(b.count() == 25);
    REQUIRE(a.count() == 25);
    for (std::size_t i = 0; i < 25; ++i) {
        CHECK(b.position[i] == c.position[i]);
        CHECK(b.log_scales[i] == c.log_scales[i]);
        CHECK(b.rotation[i] == c.rotation[i]);
        CHECK(b.opacity_logit[i] == c.opacity_logit[i]);
        CHECK(b.color_dc[i] == c.color_dc[i]);
        for (int k = 0; k < 3; ++k) CHECK(a.log_scales[i][k] == doctest::Approx(c.log_scales[i][k]).epsilon(1e-15));
        CHECK(a.opacity_logit[i] == doctest::Approx(c.opacity_logit[i]).epsilon(1e-15));
    }
}

TEST_CASE("ply: property order in the header does not matter") {
    const GaussianCloud c = cloud_from_scales({{1, 2, 3}});
    std::string text = ascii_ply(c, false);
    text = replace_once(text, "property float x\nproperty float y\n", "property float y\nproperty float x\n");
    const GaussianCloud r = parse_gaussian_ply(text);
    CHECK(r.activated_scales(0)[2] == doctest::Approx(3.0));
}

TEST_CASE("ply: malformed input") {
    const GaussianCloud c = random_cloud(3, 1);
    CHECK(kind_of([] { parse_gaussian_ply("plx\nformat ascii 1.0\n"); }) == ErrorKind::NotPly);
    CHECK(kind_of([] { parse_gaussian_ply(""); }) == ErrorKind::NotPly);
    CHECK(kind_of([&] { parse_gaussian_ply(replace_once(ascii_ply(c), "property float scale_1\n", "")); }) ==
          ErrorKind::MissingProperty);
    CHECK(kind_of([&] {
        parse_gaussian_ply(replace_once(binary_ply(c), "binary_little_endian", "binary_big_endian"));
    }) == ErrorKind::UnsupportedEncoding);
    const std::string bin = binary_ply(c);
    CHECK(kind_of([&] { parse_gaussian_ply(bin.substr(0, bin.size() - 9)); }) == ErrorKind::CorruptData);
    CHECK(kind_of([&] { parse_gaussian_ply(replace_once(ascii_ply(c), " 0.25\n", " zz\n")); }) ==
          ErrorKind::CorruptData);
    CHECK(kind_of([] { parse_gaussian_ply(ascii_ply(GaussianCloud{}, false)); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { load_gaussian_ply("/nonexistent/cloud.ply"); }) == ErrorKind::FileNotFound);
}

TEST_CASE("scale statistic: the (1, 1, 10) anchor and closed-form agreement") {
    CHECK(normalized_variance({1, 1, 10}) == doctest::Approx(1.6875).epsilon(1e-15));
    CHECK(normalized_variance({2, 2, 2}) == 0.0);
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        const std::array<double, 3> s{rng.uniform(0.01, 5), rng.uniform(0.01, 5), rng.uniform(0.01, 5)};
        CHECK(normalized_variance(s) == doctest::Approx(nu_oracle(s)).epsilon(1e-12));
    }
    CHECK(kind_of([] { normalized_variance({1, 0, 1}); }) == ErrorKind::NonPositiveScale);
    CHECK(kind_of([] { normalized_variance({1, -2, 1}); }) == ErrorKind::NonPositiveScale);
}

TEST_CASE("scale statistic: invariant to uniform rescaling and axis order, bounded by 3") {
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const std::array<double, 3> s{std::exp(rng.uniform(-6, 3)), std::exp(rng.uniform(-6, 3)),
                                      std::exp(rng.uniform(-6, 3))};
        const double nu = normalized_variance(s);
        const double k = std::exp(rng.uniform(-3, 3));
        CHECK(normalized_variance({k * s[0], k * s[1], k * s[2]}) == doctest::Approx(nu).epsilon(1e-12));
        CHECK(normalized_variance({s[2], s[0], s[1]}) == doctest::Approx(nu).epsilon(1e-12));
        CHECK(nu >= 0.0);
        CHECK(nu < 3.0);
    }
    CHECK(normalized_variance({1.0, 1e-9, 1e-9}) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("scale statistic: analytic gradient matches central differences") {
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const std::array<double, 3> s{rng.uniform(0.1, 4), rng.uniform(0.1, 4), rng.uniform(0.1, 4)};
        const auto g = normalized_variance_gradient(s);
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-6 * s[k];
            auto up = s, dn = s;
            up[k] += h;
            dn[k] -= h;
            const double fd = (normalized_variance(up) - normalized_variance(dn)) / (2 * h);
            CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6).scale(1e-8));
        }
        // Scale invariance implies the gradient is orthogonal to s.
        CHECK(std::abs(g[0] * s[0] + g[1] * s[1] + g[2] * s[2]) < 1e-12);
    }
}

TEST_CASE("scale loss: hinge, lambda weighting, histogram") {
    const GaussianCloud c = cloud_from_scales({{1, 1, 10}, {1, 10, 10}, {2, 2, 2}, {1, 1, 1000}});
    const ScaleLossReport r = scale_loss(c, 1.6, 1.0);
    REQUIRE(r.nu.size() == 4);
    CHECK(r.nu[0] == doctest::Approx(1.6875));
    CHECK(r.loss[0] == doctest::Approx(0.0875));
    CHECK(r.loss[1] == 0.0);
    CHECK(r.loss[2] == 0.0);
    CHECK(r.count_above_tau == 2);
    CHECK(r.max_nu == doctest::Approx(nu_oracle({1, 1, 1000})));
    CHECK(r.mean_loss == doctest::Approx((r.loss[0] + r.loss[3]) / 4.0));
    CHECK(r.histogram[0] == 1);
    CHECK(r.histogram[13] == 1);
    std::size_t total = 0;
    for (auto n : r.histogram) total += n;
    CHECK(total == 4);

    const ScaleLossReport big = scale_loss(c, 1.6, 1e5);
    CHECK(big.mean_loss == doctest::Approx(1e5 * r.mean_loss));
    CHECK(big.loss == r.loss);
    CHECK(scale_loss(c, 3.0, 1.0).count_above_tau == 0);
}

TEST_CASE("scale loss: defaults and file loading") {
    const auto dir = testing::temp_dir("gsply");
    testing::write_text(dir / "c.ply", binary_ply(cloud_from_scales({{1, 1, 10}})));
    const ScaleLossReport r = scale_loss(load_gaussian_ply(dir / "c.ply"));
    CHECK(r.tau == kDefaultTau);
    CHECK(r.lambda == kDefaultLambdaScale);
    CHECK(r.mean_loss == doctest::Approx(1e5 * 0.0875));
}
