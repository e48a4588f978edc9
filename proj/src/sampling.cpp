#include "hlwr/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "hlwr/errors.hpp"

namespace hlwr {

namespace {

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

} // namespace

HState random_state(const CurveFamily& fam, Rng& rng, double h_max)
{
    const double h = 1.0 + uniform(rng) * (h_max - 1.0);
    const double lo = fam.uD(h), hi = fam.uA(h);
    return {lo + uniform(rng) * (hi - lo), h};
}

std::optional<Wave> try_random_shock(const CurveFamily& fam, WaveKind kind, Rng& rng, double h_max)
{
    const double h = 1.0 + uniform(rng) * (h_max - 1.0);
    const double lo = fam.uD(h), hi = fam.uA(h);
    HState left{lo + uniform(rng) * (hi - lo), h}, right;
    switch (kind) {
    case WaveKind::ScS:
        right = {lo + uniform(rng) * (left.u - lo), h};
        break;
    case WaveKind::DS: {
        left = state_on_decel(fam, lo);
        right = state_on_decel(fam, 1.2 + uniform(rng) * (lo - 1.2));
        break;
    }
    case WaveKind::ScAS: {
        const double u = hi + uniform(rng) * 3.0;
        right = state_on_accel(fam, u);
        break;
    }
    case WaveKind::ScDS:
        right = state_on_decel(fam, 1.1 + uniform(rng) * (lo - 1.1));
        break;
    case WaveKind::ST: {
        const double v = velocity(fam, left);
        const double a = inv_vD(fam, v), b = inv_vA(fam, v);
        const double u = std::min(a, b) + uniform(rng) * std::abs(a - b);
        try {
            right = state_at(fam, u, v);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        break;
    }
    default:
        throw ConfigError(std::string("random shock: ") + to_string(kind) + " is not a shock");
    }
    if (wave_problem(fam, kind, left, right)) return std::nullopt;
    return make_wave(fam, kind, left, right);
}

Wave random_shock(const CurveFamily& fam, WaveKind kind, Rng& rng, long max_tries)
{
    for (long i = 0; i < max_tries; ++i)
        if (auto w = try_random_shock(fam, kind, rng)) return *w;
    throw NoSolution(std::string("random shock: no admissible ") + to_string(kind) + " drawn");
}

} // namespace hlwr
