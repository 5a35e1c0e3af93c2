#include "doctest.h"

#include "carima/diagnostics.hpp"
#include "carima/error.hpp"

#include <cmath>
#include <random>

using namespace carima;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> x(n);
    for (double& v : x) v = z(rng);
    return x;
}

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
    std::vector<double> e = gaussian(n + 500, seed);
    std::vector<double> x(n + 500, 0.0);
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = phi * x[t - 1] + e[t];
    return {x.begin() + 500, x.end()};
}

}  // namespace

TEST_CASE("acf basics") {
    const auto noise = gaussian(10'000, 1);
    const auto r = acf(noise, 5);
    CHECK(r[0] == 1.0);
    CHECK(std::abs(r[1]) < 0.03);

    const auto x = ar1(50'000, 0.5, 2);
    const auto rx = acf(x, 5);
    for (std::size_t k = 1; k <= 5; ++k) CHECK(std::abs(rx[k] - std::pow(0.5, k)) < 0.02);

    CHECK_THROWS_AS((void)acf(std::vector<double>{1.0, 2.0}, 2), Error);
}

TEST_CASE("acf bounds and pacf agreement") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto x = gaussian(60, seed);
        if (seed % 2 == 0) x = ar1(60, 0.9, seed);
        const auto r = acf(x, 20);
        for (double v : r) {
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v >= -1.0 - 1e-12);
        }
        const auto p = pacf(x, 20);
        CHECK(p[1] == doctest::Approx(r[1]).epsilon(1e-14));
    }
}

TEST_CASE("pacf of AR(1) cuts off after lag 1") {
    const auto x = ar1(50'000, 0.6, 5);
    const auto p = pacf(x, 6);
    CHECK(p[1] == doctest::Approx(0.6).epsilon(0.03));
    for (std::size_t k = 2; k <= 6; ++k) CHECK(std::abs(p[k]) < 0.02);
}

TEST_CASE("ljung_box") {
    const std::vector<double> zeros(100, 0.0);
    const LjungBox zero = ljung_box(zeros, 10, 0);
    CHECK(zero.statistic == 0.0);
    CHECK(zero.p_value == 1.0);

    CHECK_THROWS_AS((void)ljung_box(zeros, 3, 3), Error);

    const LjungBox dependent = ljung_box(ar1(500, 0.8, 9), 20, 0);
    CHECK(dependent.p_value < 0.001);
}

TEST_CASE("ljung_box size under iid noise") {
    int rejections = 0;
    const int reps = 500;
    for (int rep = 0; rep < reps; ++rep) {
        const auto noise = gaussian(5'000, 1000 + static_cast<std::uint64_t>(rep));
        if (ljung_box(noise, 20, 0).p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate >= 0.025);
    CHECK(rate <= 0.075);
}

TEST_CASE("qq_points") {
    const auto single = qq_points(std::vector<double>{0.0});
    REQUIRE(single.size() == 1);
    CHECK(single[0].theoretical == doctest::Approx(0.0));
    CHECK(single[0].sample == 0.0);

    const std::vector<double> symmetric{2, 4, 5, 6, 8, 1, 9};
    const auto pts = qq_points(symmetric, true);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& mirror = pts[pts.size() - 1 - i];
        CHECK(pts[i].theoretical == doctest::Approx(-mirror.theoretical).epsilon(1e-12));
        CHECK(pts[i].sample == doctest::Approx(-mirror.sample).epsilon(1e-12));
    }

    const auto normal = qq_points(gaussian(10'000, 17));
    double worst = 0.0;
    for (std::size_t i = 100; i + 100 < normal.size(); ++i) {
        worst = std::max(worst, std::abs(normal[i].theoretical - normal[i].sample));
    }
    CHECK(worst < 0.1);
}
