#include <doctest.h>

#include <random>

#include "hlwr/errors.hpp"
#include "hlwr/riemann.hpp"
#include "hlwr/sampling.hpp"

using namespace hlwr;

namespace {
const CurveFamily fam = make_default_family();

std::vector<WaveKind> kinds(const RiemannFan& f)
{
    std::vector<WaveKind> out;
    for (const auto& w : f.waves) out.push_back(w.kind);
    return out;
}
} // namespace

TEST_CASE("equal states give an empty fan")
{
    const HState s = state_at(fam, 3.0, 0.6);
    auto fan = solve_riemann(fam, s, s);
    CHECK(fan.waves.empty());
    CHECK(validate_fan(fam, fan).pass);
}

TEST_CASE("free-zone cases")
{
    SUBCASE("faster right beyond the scanning curve")
    {
        auto fan = solve_riemann(fam, state_on_decel(fam, 6.0), state_on_accel(fam, 8.0));
        CHECK(fan.case_tag == "C1.i");
        CHECK(kinds(fan) == std::vector{WaveKind::ScR, WaveKind::AR});
    }
    SUBCASE("slower right on the same scanning curve")
    {
        auto fan = solve_riemann(fam, {6.2, 6.0}, {6.05, 6.0});
        CHECK(fan.case_tag == "C1.ii.a");
        CHECK(kinds(fan) == std::vector{WaveKind::ScS});
    }
}

TEST_CASE("congested cases")
{
    SUBCASE("braking onto vD")
    {
        auto fan = solve_riemann(fam, state_on_decel(fam, 3.0), state_on_decel(fam, 2.0));
        CHECK(fan.case_tag == "C2.i");
        REQUIRE(fan.waves.size() == 1);
        CHECK(fan.waves[0].kind == WaveKind::DS);
        CHECK(fan.waves[0].speed == doctest::Approx(-(0.5 - 2.0 / 3.0) / (2.0 - 3.0)));
    }
    SUBCASE("mild braking stays on the scanning curve")
    {
        const HState l{3.2, 2.9};
        const HState r{3.05, 2.9};
        auto fan = solve_riemann(fam, l, r);
        CHECK(fan.case_tag == "C2.ii");
        CHECK(kinds(fan) == std::vector{WaveKind::ScS});
    }
    SUBCASE("mild acceleration is a scanning rarefaction")
    {
        auto fan = solve_riemann(fam, {3.2, 2.9}, {3.3, 2.9});
        CHECK(fan.case_tag == "C2.iii.a");
        CHECK(kinds(fan) == std::vector{WaveKind::ScR});
    }
    SUBCASE("strong acceleration ends on vA")
    {
        auto fan = solve_riemann(fam, state_at(fam, 3.0, 0.6), state_on_accel(fam, 5.0));
        CHECK(fan.case_tag.rfind("C2.iii", 0) == 0);
        REQUIRE_FALSE(fan.waves.empty());
        CHECK(on_accel(fam, fan.waves.back().right));
        CHECK(validate_fan(fam, fan).pass);
    }
    SUBCASE("equal velocities give a stationary jump")
    {
        auto fan = solve_riemann(fam, state_at(fam, 2.8, 0.6), state_at(fam, 3.0, 0.6));
        CHECK(fan.case_tag == "ST");
        REQUIRE(fan.waves.size() == 1);
        CHECK(fan.waves[0].speed == 0.0);
    }
}

TEST_CASE("states outside the band are rejected")
{
    CHECK_THROWS_AS(solve_riemann(fam, {3.0, 3.0}, {3.0, 1.0}), NoSolution);
}

TEST_CASE("random pairs: ordered, negative speeds, ST last")
{
    Rng rng(2024);
    for (int n = 0; n < 2000; ++n) {
        const HState l = random_state(fam, rng), r = random_state(fam, rng);
        CAPTURE(l.u);
        CAPTURE(l.h);
        CAPTURE(r.u);
        CAPTURE(r.h);
        RiemannFan fan;
        REQUIRE_NOTHROW(fan = solve_riemann(fam, l, r));
        CHECK(validate_fan(fam, fan).pass);
        for (std::size_t k = 0; k < fan.waves.size(); ++k) {
            const Wave& w = fan.waves[k];
            if (w.kind == WaveKind::ST) {
                CHECK(k + 1 == fan.waves.size());
                CHECK(w.speed == 0.0);
            } else {
                CHECK(w.right_edge() < 0.0);
            }
            if (k > 0) CHECK(fan.waves[k - 1].right_edge() <= w.left_edge() + 1e-12);
        }
    }
}

TEST_CASE("over-braking inserts a stop on vD")
{
    const HState l = state_on_decel(fam, 3.0), r = state_at(fam, 3.3, 0.65);
    auto fan = solve_riemann_overbraking(fam, l, r, 0.4);
    CHECK(fan.case_tag.rfind("OB+", 0) == 0);
    REQUIRE(fan.waves.size() == 3);
    CHECK(fan.waves[0].kind == WaveKind::DS);
    CHECK(velocity(fam, fan.waves[0].right) == doctest::Approx(0.4));
    CHECK(fan.waves.back().kind == WaveKind::ST);
    CHECK(validate_fan(fam, fan).pass);
    CHECK_THROWS_AS(solve_riemann_overbraking(fam, l, r, 0.7), NoSolution);
}

TEST_CASE("validate_fan flags a tampered fan")
{
    auto fan = solve_riemann(fam, state_on_decel(fam, 3.0), state_on_decel(fam, 2.0));
    fan.waves[0].speed += 0.1;
    auto rep = validate_fan(fam, fan);
    CHECK_FALSE(rep.pass);
    CHECK(rep.has("speed-mismatch"));
}
