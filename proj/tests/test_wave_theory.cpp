#include <doctest.h>

#include <cmath>
#include <random>

#include "hlwr/errors.hpp"
#include "hlwr/sampling.hpp"
#include "hlwr/wave_theory.hpp"

using namespace hlwr;

namespace {
const CurveFamily fam = make_default_family();
}

TEST_CASE("shock speed is minus the chord slope")
{
    const HState l{3.0, 3.0}, r{2.0, 2.0};
    CHECK(shock_speed(fam, l, r) == doctest::Approx(-(0.5 - 2.0 / 3.0) / (2.0 - 3.0)).epsilon(1e-15));
    const HState a{3.2, 3.0}, b{3.0, 3.0};
    const double want = -(fam.vS(3.0, 3.0) - fam.vS(3.2, 3.0)) / (3.0 - 3.2);
    CHECK(shock_speed(fam, a, b) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("wave kinds round-trip through their names")
{
    for (WaveKind k : {WaveKind::ScS, WaveKind::ScR, WaveKind::AR, WaveKind::DS, WaveKind::ScAS, WaveKind::ScDS, WaveKind::ST})
        CHECK(wave_kind_from_string(to_string(k)) == k);
    CHECK(is_rarefaction(WaveKind::ScR));
    CHECK_FALSE(is_rarefaction(WaveKind::ST));
}

TEST_CASE("make_wave enforces direction and curve membership")
{
    CHECK_NOTHROW(make_wave(fam, WaveKind::ScS, {3.3, 3.0}, {3.1, 3.0}));
    CHECK_THROWS_AS(make_wave(fam, WaveKind::ScS, {3.1, 3.0}, {3.3, 3.0}), InadmissibleWave);
    CHECK_THROWS_AS(make_wave(fam, WaveKind::ScS, {3.3, 3.0}, {3.1, 2.9}), InadmissibleWave);
    CHECK_NOTHROW(make_wave(fam, WaveKind::DS, state_on_decel(fam, 3.0), state_on_decel(fam, 2.0)));
    CHECK_THROWS_AS(make_wave(fam, WaveKind::DS, state_on_decel(fam, 2.0), state_on_decel(fam, 3.0)), InadmissibleWave);
    // stationary shock needs equal velocities
    const HState s1 = state_at(fam, 2.8, 0.6), s2 = state_at(fam, 3.0, 0.6);
    auto w = make_wave(fam, WaveKind::ST, s1, s2);
    CHECK(w.speed == 0.0);
    CHECK_THROWS_AS(make_wave(fam, WaveKind::ST, s1, state_at(fam, 3.0, 0.61)), InadmissibleWave);
}

TEST_CASE("rarefaction interior lies on the curve with xi between the edges")
{
    const HState l{3.05, 3.0}, r{3.5, 3.0};
    auto w = make_wave(fam, WaveKind::ScR, l, r);
    CHECK(w.fan[0] == doctest::Approx(-fam.dvS_u(3.05, 3.0)));
    CHECK(w.fan[1] == doctest::Approx(-fam.dvS_u(3.5, 3.0)));
    const double xi = 0.5 * (w.fan[0] + w.fan[1]);
    HState m = rarefaction_state(fam, w, xi);
    CHECK(m.h == 3.0);
    CHECK(-fam.dvS_u(m.u, 3.0) == doctest::Approx(xi).epsilon(1e-10));
}

TEST_CASE("chord predicates fail in the free zone")
{
    Rng rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int tested = 0;
    while (tested < 200) {
        const HState l = random_state(fam, rng, 9.0);
        if (l.u < fam.u_c) continue;
        const double up = fam.uA(l.h) + U(rng) * 4.0;
        CHECK_FALSE(chord_s2a(fam, l, up));
        CHECK(wave_problem(fam, WaveKind::ScAS, l, state_on_accel(fam, up)).has_value());
        ++tested;
    }
}

TEST_CASE("viscous profile connects admissible shocks and rejects a tampered speed")
{
    Rng rng(5);
    for (WaveKind k : {WaveKind::ScS, WaveKind::DS, WaveKind::ScAS, WaveKind::ScDS, WaveKind::ST}) {
        CAPTURE(to_string(k));
        Wave w = random_shock(fam, k, rng);
        auto rep = viscous_profile_check(fam, w);
        CHECK(rep.connected);
        CHECK(rep.monotone);
        CHECK(rep.max_endpoint_gap <= 1e-6);
    }
    Wave w = make_wave(fam, WaveKind::DS, state_on_decel(fam, 3.0), state_on_decel(fam, 2.0));
    w.speed *= 0.5;
    CHECK_FALSE(viscous_profile_check(fam, w).connected);
}
