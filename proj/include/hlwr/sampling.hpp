#pragma once

#include <optional>
#include <random>

#include "hlwr/curve_model.hpp"
#include "hlwr/wave_theory.hpp"

namespace hlwr {

using Rng = std::mt19937_64;

/// Uniform h in [1, h_max], then uniform u across the band of that h.
HState random_state(const CurveFamily& fam, Rng& rng, double h_max = 8.0);

/// One draw of a shock of the given kind; nothing when the draw is inadmissible.
std::optional<Wave> try_random_shock(const CurveFamily& fam, WaveKind kind, Rng& rng, double h_max = 8.0);

/// Repeats try_random_shock up to max_tries times; throws NoSolution if none is admissible.
Wave random_shock(const CurveFamily& fam, WaveKind kind, Rng& rng, long max_tries = 1000000);

} // namespace hlwr
