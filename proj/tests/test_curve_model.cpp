#include <doctest.h>

#include <cmath>

#include "hlwr/curve_model.hpp"
#include "hlwr/errors.hpp"
#include "mutations.hpp"

using namespace hlwr;

namespace {
const CurveFamily fam = make_default_family();
}

TEST_CASE("extremal curves match their closed forms")
{
    CHECK(fam.vD(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fam.vA(2.0) == 0.0);
    CHECK(fam.vA(4.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(fam.vD(4.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(fam.u_c == 4.0);
    CHECK(fam.uA(4.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(fam.uA(9.0) == doctest::Approx(9.0 + 0.2 * 5.0).epsilon(1e-15));
    CHECK(fam.uA(1.0) == doctest::Approx(2.0 * (1.0 + 0.15 * 0.75)).epsilon(1e-15));
    // hand-differentiated slopes
    CHECK(fam.dvD(3.0) == doctest::Approx(1.0 / 9.0));
    CHECK(fam.dvA(3.0) == doctest::Approx(8.0 / 27.0));
}

TEST_CASE("scanning curves interpolate the extremal curves with t(3-t)/2")
{
    const double h = 2.5, lo = 2.5, hi = fam.uA(2.5);
    for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const double u = lo + t * (hi - lo);
        const double want = fam.vD(lo) + (fam.vA(hi) - fam.vD(lo)) * t * (3.0 - t) / 2.0;
        CHECK(fam.vS(u, h) == doctest::Approx(want).epsilon(1e-14));
    }
    // central difference of vS against dvS_u
    const double u = lo + 0.3 * (hi - lo), e = 1e-6;
    CHECK(fam.dvS_u(u, h) == doctest::Approx((fam.vS(u + e, h) - fam.vS(u - e, h)) / (2 * e)).epsilon(1e-7));
}

TEST_CASE("velocity picks the branch by position in the band")
{
    CHECK(velocity(fam, 3.0, 3.0) == doctest::Approx(fam.vD(3.0)));
    CHECK(velocity(fam, fam.uA(2.0), 2.0) == doctest::Approx(fam.vA(fam.uA(2.0))));
    CHECK(velocity(fam, 2.5, 2.0) == doctest::Approx(fam.vS(2.5, 2.0)));
    CHECK(mode_of(fam, {2.5, 2.0}, 0) == DriverMode::Scanning);
}

TEST_CASE("inverses round-trip")
{
    CHECK(inv_vD(fam, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(inv_vA(fam, 0.75) == doctest::Approx(4.0).epsilon(1e-12));
    for (double h : {1.0, 2.0, 3.5, 6.0}) {
        const double u = fam.uD(h) + 0.4 * (fam.uA(h) - fam.uD(h));
        CHECK(inv_vS(fam, fam.vS(u, h), h) == doctest::Approx(u).epsilon(1e-12));
        CHECK(fam.hA(fam.uA(h)) == doctest::Approx(h).epsilon(1e-12));
        CHECK(fam.hD(fam.uD(h)) == doctest::Approx(h).epsilon(1e-12));
    }
    const HState s = state_at(fam, 3.0, 0.6);
    CHECK(velocity(fam, s) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(in_band(fam, s));
    CHECK_THROWS_AS(state_at(fam, 3.0, 0.9), DomainError);
}

TEST_CASE("eulerian conversion")
{
    auto [rho, h] = to_eulerian({4.0, 3.0});
    CHECK(rho == doctest::Approx(0.25));
    CHECK(h == 3.0);
    CHECK(from_eulerian(0.25, 3.0) == HState{4.0, 3.0});
    CHECK_THROWS_AS(from_eulerian(0.0, 1.0), DomainError);
}

TEST_CASE("default family passes validation")
{
    auto rep = validate_family(fam, 120);
    CHECK(rep.pass);
    CHECK(rep.violations.empty());
}

TEST_CASE("each mutation fails on its intended inequality")
{
    for (const auto& m : mutation_suite()) {
        CAPTURE(m.label);
        auto rep = validate_family(m.fam, 120);
        CHECK_FALSE(rep.pass);
        CHECK(rep.has(m.intended_check));
    }
}

TEST_CASE("family JSON")
{
    CHECK(family_from_json({{"builtin", "default-concave-v1"}}).name == "default-concave-v1");
    CHECK_THROWS_AS(family_from_json({{"builtin", "nope"}}), ConfigError);
    CHECK_THROWS_AS(family_from_json({{"custom", {{"wobble", 1.0}}}}), ConfigError);
    auto broken = family_from_json({{"custom", {{"band_congested", -0.9}}}});
    CHECK_FALSE(validate_family(broken, 60).pass);
    CHECK_THROWS_AS(load_family("/definitely/missing.json"), ConfigError);
}
