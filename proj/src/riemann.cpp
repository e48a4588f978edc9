#include "hlwr/riemann.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include "hlwr/errors.hpp"
#include "hlwr/numerics.hpp"

namespace hlwr {

namespace {

constexpr double kBandTol = 1e-9;
constexpr double kVelTol = 1e-12;
constexpr double kOrderTol = 1e-10;

using Steps = std::vector<std::pair<WaveKind, HState>>;

bool same_state(const HState& a, const HState& b)
{
    return std::abs(a.u - b.u) < kZeroStrength && std::abs(a.h - b.h) < kZeroStrength;
}

// Chain the steps from `left`, close with an ST to `right`, drop zero-strength
// pieces. Returns nothing when a piece is inadmissible or the fan fails validation.
std::optional<RiemannFan> assemble(const CurveFamily& fam, const HState& left, const HState& right, const Steps& steps,
                                   std::string tag)
{
    RiemannFan fan{left, right, {}, std::move(tag)};
    try {
        HState cur = left;
        for (const auto& [kind, next] : steps) {
            if (std::abs(next.u - cur.u) < kZeroStrength) continue;
            fan.waves.push_back(make_wave(fam, kind, cur, next));
            cur = next;
        }
        if (std::abs(right.u - cur.u) >= kZeroStrength) {
            fan.waves.push_back(make_wave(fam, WaveKind::ST, cur, right));
        } else if (!fan.waves.empty()) {
            Wave& last = fan.waves.back();
            last = make_wave(fam, last.kind, last.left, right);
        }
    } catch (const InadmissibleWave&) {
        return std::nullopt;
    }
    if (!validate_fan(fam, fan).pass) return std::nullopt;
    return fan;
}

RiemannFan first_valid(const CurveFamily& fam, const HState& left, const HState& right,
                       const std::vector<std::pair<std::string, Steps>>& candidates)
{
    for (const auto& [tag, steps] : candidates) {
        if (auto fan = assemble(fam, left, right, steps, tag)) return *fan;
    }
    std::string tags;
    for (const auto& c : candidates) tags += (tags.empty() ? "" : ", ") + c.first;
    throw NoSolution("solve_riemann: no admissible fan among candidates [" + tags + "]");
}

} // namespace

double tangent_on_scanning(const CurveFamily& fam, double h_minus, double u2, double lo)
{
    const double hi = fam.uA(h_minus);
    if (!(u2 > hi)) throw NoRoot("tangent_on_scanning: u2 must lie beyond the scanning curve");
    const double va2 = fam.vA(u2);
    auto res = [&](double u1) { return fam.dvS_u(u1, h_minus) * (u2 - u1) - (va2 - fam.vS(u1, h_minus)); };
    if (!(res(lo) > 0.0) || !(res(hi) < 0.0)) throw NoRoot("tangent_on_scanning: no tangency on the scanning curve");
    return bisect(res, lo, hi);
}

double tangent_on_scanning(const CurveFamily& fam, double h_minus, double u2)
{
    return tangent_on_scanning(fam, h_minus, u2, fam.uD(h_minus));
}

double tangent_on_accel(const CurveFamily& fam, const HState& left)
{
    const double um = left.u, vm = velocity(fam, left);
    auto res = [&](double u) { return fam.dvA(u) * (u - um) - (fam.vA(u) - vm); };
    double lo = std::max(fam.uA(left.h), fam.u0A);
    if (!(res(lo) > 0.0)) throw NoRoot("tangent_on_accel: chord already steeper than vA at the junction");
    double hi = 2.0 * lo;
    while (res(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw NoRoot("tangent_on_accel: no tangency");
    }
    return bisect(res, lo, hi);
}

RiemannFan solve_riemann(const CurveFamily& fam, const HState& left, const HState& right)
{
    if (!in_band(fam, left, kBandTol) || !in_band(fam, right, kBandTol))
        throw NoSolution("solve_riemann: states must be in band");
    if (same_state(left, right)) return {left, right, {}, "const"};

    const double vm = velocity(fam, left), vp = velocity(fam, right);
    if (vp >= fam.vbar) throw NoSolution("solve_riemann: right velocity at or above vbar");
    if (std::abs(vp - vm) <= kVelTol) return first_valid(fam, left, right, {{"ST", {}}});

    const double h = left.h;
    const double lo = fam.uD(h), hi = fam.uA(h);
    const double v_lo = fam.vD(lo), v_hi = fam.vA(hi);
    auto on_scan = [&](double v) { return HState{inv_vS(fam, v, h), h}; };
    auto on_d = [&](double v) { return state_on_decel(fam, inv_vD(fam, v)); };
    auto on_a = [&](double v) { return state_on_accel(fam, inv_vA(fam, v)); };
    const bool left_on_d = on_decel(fam, left);
    const bool left_on_a = on_accel(fam, left);
    const WaveKind down = left_on_d ? WaveKind::DS : WaveKind::ScDS;

    std::vector<std::pair<std::string, Steps>> cand;

    if (left.u >= fam.u_c) {
        if (vp > vm) {
            if (vp <= v_hi) cand.push_back({"C1.i", {{WaveKind::ScR, on_scan(vp)}}});
            else cand.push_back({"C1.i", {{WaveKind::ScR, {hi, h}}, {WaveKind::AR, on_a(vp)}}});
        } else if (vp >= v_lo) {
            cand.push_back({"C1.ii.a", {{WaveKind::ScS, on_scan(vp)}}});
        } else {
            cand.push_back({"C1.ii.a", {{WaveKind::ScS, {lo, h}}, {WaveKind::DS, on_d(vp)}}});
            cand.push_back({"C1.ii.b", {{down, on_d(vp)}}});
        }
        return first_valid(fam, left, right, cand);
    }

    if (vp < vm) {
        if (vp <= v_lo) {
            cand.push_back({"C2.i", {{down, on_d(vp)}}});
            cand.push_back({"C2.i*", {{WaveKind::ScS, {lo, h}}, {WaveKind::DS, on_d(vp)}}});
        } else {
            cand.push_back({"C2.ii", {{WaveKind::ScS, on_scan(vp)}}});
        }
        return first_valid(fam, left, right, cand);
    }

    if (vp <= v_hi) return first_valid(fam, left, right, {{"C2.iii.a", {{WaveKind::ScR, on_scan(vp)}}}});

    const HState top = on_a(vp);
    if (left_on_a) return first_valid(fam, left, right, {{"C2.iii.d", {{WaveKind::AR, top}}}});
    try {
        double u1 = tangent_on_scanning(fam, h, top.u, left.u);
        cand.push_back({"C2.iii.b", {{WaveKind::ScR, {u1, h}}, {WaveKind::ScAS, top}}});
    } catch (const NoRoot&) {
    }
    cand.push_back({"C2.iii.c", {{WaveKind::ScAS, top}}});
    try {
        double u4 = tangent_on_accel(fam, left);
        if (u4 < top.u) cand.push_back({"C2.iii.d", {{WaveKind::ScAS, state_on_accel(fam, u4)}, {WaveKind::AR, top}}});
    } catch (const NoRoot&) {
    }
    return first_valid(fam, left, right, cand);
}

RiemannFan solve_riemann_overbraking(const CurveFamily& fam, const HState& left, const HState& right, double v2)
{
    if (!in_band(fam, left, kBandTol) || !in_band(fam, right, kBandTol))
        throw NoSolution("overbraking: states must be in band");
    const double vm = velocity(fam, left), vp = velocity(fam, right);
    if (left.u >= fam.u_c) throw NoSolution("overbraking: left state must be congested");
    if (vp > vm + kVelTol) throw NoSolution("overbraking: needs v+ <= v-");
    if (!(v2 < vp)) throw NoSolution("overbraking: v2 must be below v+");

    const HState mid = state_on_decel(fam, inv_vD(fam, v2));
    const WaveKind down = on_decel(fam, left) ? WaveKind::DS : WaveKind::ScDS;
    RiemannFan fan{left, right, {}, ""};
    try {
        fan.waves.push_back(make_wave(fam, down, left, mid));
    } catch (const InadmissibleWave& e) {
        throw NoSolution(std::string("overbraking: ") + e.what());
    }
    RiemannFan rest = solve_riemann(fam, mid, right);
    fan.waves.insert(fan.waves.end(), rest.waves.begin(), rest.waves.end());
    fan.case_tag = "OB+" + rest.case_tag;
    auto rep = validate_fan(fam, fan);
    if (!rep.pass) throw NoSolution("overbraking: fan fails validation (" + rep.violations.front().check + ")");
    return fan;
}

ValidationReport validate_fan(const CurveFamily& fam, const RiemannFan& fan)
{
    ValidationReport rep;
    auto flag = [&](const std::string& check, const HState& s, double amount) {
        rep.violations.push_back({check, s.u, s.h, amount});
    };
    const auto& ws = fan.waves;
    if (ws.empty()) {
        if (!same_state(fan.left, fan.right)) flag("empty-fan-jump", fan.left, fan.right.u - fan.left.u);
        rep.pass = rep.violations.empty();
        return rep;
    }
    if (!(ws.front().left == fan.left)) flag("left-endpoint", ws.front().left, ws.front().left.u - fan.left.u);
    const HState& end = ws.back().right;
    if (std::abs(velocity(fam, end) - velocity(fam, fan.right)) > kVelTol)
        flag("right-velocity", end, velocity(fam, end) - velocity(fam, fan.right));
    if (ws.back().kind == WaveKind::ST ? !(end == fan.right) : std::abs(end.u - fan.right.u) >= kZeroStrength)
        flag("right-endpoint", end, end.u - fan.right.u);

    for (std::size_t k = 0; k < ws.size(); ++k) {
        const Wave& w = ws[k];
        if (k + 1 < ws.size()) {
            if (!(w.right == ws[k + 1].left)) flag("adjacency", w.right, ws[k + 1].left.u - w.right.u);
            if (w.right_edge() > ws[k + 1].left_edge() + kOrderTol)
                flag("speed-order", w.right, w.right_edge() - ws[k + 1].left_edge());
            if (w.kind == WaveKind::ST) flag("st-not-last", w.left, 0.0);
        }
        if (!in_band(fam, w.left, kBandTol)) flag("off-band", w.left, 0.0);
        if (!in_band(fam, w.right, kBandTol)) flag("off-band", w.right, 0.0);
        if (w.kind == WaveKind::ST) {
            if (w.speed != 0.0) flag("st-speed", w.left, w.speed);
        } else if (!(w.right_edge() < 0.0)) {
            flag("nonnegative-speed", w.left, w.right_edge());
        }
        if (auto why = wave_problem(fam, w.kind, w.left, w.right)) {
            flag("admissibility: " + *why, w.left, 0.0);
            continue;
        }
        Wave ref = make_wave(fam, w.kind, w.left, w.right);
        double d = std::max(std::abs(ref.left_edge() - w.left_edge()), std::abs(ref.right_edge() - w.right_edge()));
        if (d > kVelTol) flag("speed-mismatch", w.left, d);
    }
    rep.pass = rep.violations.empty();
    return rep;
}

} // namespace hlwr
