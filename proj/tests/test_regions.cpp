#include <doctest.h>

#include <cmath>

#include "spinboson/regions.hpp"

using namespace spinboson;

namespace {

ModelParams params() {
    ModelParams p;
    p.vartheta = 0.45;
    p.rho0 = 0.3;
    p.gamma = 0.25;
    return p;
}

}  // namespace

TEST_CASE("window membership: rectangle, sweep tail, and outside points") {
    ModelParams p = params();
    RegionA a = region_a(p);
    double s = std::sin(p.vartheta);

    CHECK(a.contains(Complex(2.0, 0.0)));
    CHECK(a.contains(Complex(2.0 + p.rho0 / 8.0, s * p.rho0 / 8.0)));
    // A point swept backwards along -e^{-i vartheta} stays inside.
    Complex swept = Complex(2.0, 0.0) - std::exp(Complex(0.0, -p.vartheta)) * 1.3;
    CHECK(a.contains(swept));
    // Straight left of the rectangle without the tilt compensation is outside.
    CHECK_FALSE(a.contains(Complex(1.8, 0.0)));
    CHECK_FALSE(a.contains(Complex(2.0, s * p.rho0)));
    CHECK_FALSE(a.contains(Complex(2.0 + p.rho0, 0.0)));
}

TEST_CASE("punctured window removes the inner disk") {
    ModelParams p = params();
    RegionA0 a0 = region_a0(p);
    double r = (std::sin(p.vartheta) / 16.0) * p.rho0;
    CHECK_FALSE(a0.contains(Complex(2.0, 0.0)));
    CHECK_FALSE(a0.contains(Complex(2.0 + 0.5 * r, 0.0)));
    CHECK(a0.contains(Complex(2.0 + 2.0 * r, 0.0)));
}

TEST_CASE("cut window discards points below the horizontal line") {
    ModelParams p = params();
    Complex energy(2.0, -1e-4);
    RegionBelowCut am = region_am(p, energy, p.rho0 * p.gamma);
    double depth = (std::sin(p.vartheta) / 4.0) * p.rho0 * p.gamma;
    CHECK(am.contains(energy + Complex(0.0, -0.5 * depth)));
    CHECK_FALSE(am.contains(energy + Complex(0.0, -2.0 * depth)));

    RegionBelowCut at = region_a_tilde(p, energy, p.rho0 * p.gamma);
    CHECK(at.depth == doctest::Approx(2.0 * am.depth));
}

TEST_CASE("halton stream is deterministic and space filling") {
    CHECK(halton(0, 2) == 0.5);
    CHECK(halton(1, 2) == 0.25);
    CHECK(halton(0, 3) == doctest::Approx(1.0 / 3.0));
    for (int i = 0; i < 50; ++i) {
        double v = halton(static_cast<std::size_t>(i), 2);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("region samples are members and reproducible") {
    ModelParams p = params();
    auto zs1 = sample_region_a0(p, 64);
    auto zs2 = sample_region_a0(p, 64);
    REQUIRE(zs1.size() == 64);
    RegionA0 a0 = region_a0(p);
    for (std::size_t i = 0; i < zs1.size(); ++i) {
        CHECK(zs1[i] == zs2[i]);
        CHECK(a0.contains(zs1[i]));
    }
}

TEST_CASE("annulus samples respect the region and the two radii") {
    ModelParams p = params();
    Complex energy(2.0, -1e-5);
    double rho_next = p.rho0 * p.gamma;
    RegionBelowCut at = region_a_tilde(p, energy, rho_next);
    double r1 = 0.01 * rho_next, r2 = 0.05 * rho_next;
    auto zs = sample_annulus_in_region(at, energy, r1, r2, 16);
    REQUIRE(zs.size() == 16);
    for (Complex z : zs) {
        CHECK(at.contains(z));
        double d = std::abs(z - energy);
        CHECK((std::abs(d - r1) < 1e-12 || std::abs(d - r2) < 1e-12));
    }
}
