#pragma once

#include <string>
#include <vector>

#include "hlwr/curve_model.hpp"
#include "hlwr/wave_theory.hpp"

namespace hlwr {

struct RiemannFan {
    HState left;
    HState right;
    std::vector<Wave> waves;
    std::string case_tag;
    friend bool operator==(const RiemannFan&, const RiemannFan&) = default;
};

RiemannFan solve_riemann(const CurveFamily& fam, const HState& left, const HState& right);

/// Fan through an over-braked state on vD with velocity v2 < v(right).
RiemannFan solve_riemann_overbraking(const CurveFamily& fam, const HState& left, const HState& right, double v2);

/// u1 on the scanning curve h_minus where the chord to (u2, vA(u2)) is tangent.
/// Searches (lo, uA(h_minus)); throws NoRoot when there is no tangency.
double tangent_on_scanning(const CurveFamily& fam, double h_minus, double u2, double lo);
double tangent_on_scanning(const CurveFamily& fam, double h_minus, double u2);

/// u4 on vA where the chord from `left` is tangent; throws NoRoot.
double tangent_on_accel(const CurveFamily& fam, const HState& left);

ValidationReport validate_fan(const CurveFamily& fam, const RiemannFan& fan);

} // namespace hlwr
