#include "hlwr/wave_theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "hlwr/errors.hpp"
#include "hlwr/numerics.hpp"

namespace hlwr {

namespace {

constexpr double kBandTol = 1e-9;
constexpr double kVelTol = 1e-12;

std::string fmt_state(const HState& s)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << s.u << ", " << s.h << ")";
    return os.str();
}

// Sample abscissae strictly between a and b, plus any junction points inside
// and a geometric cluster at both ends.
template <class F>
bool all_samples(double a, double b, int n, const std::array<double, 2>& extra, F&& pred)
{
    double lo = std::min(a, b), hi = std::max(a, b);
    for (int j = 1; j <= n; ++j) {
        double u = a + (b - a) * static_cast<double>(j) / (n + 1);
        if (!pred(u)) return false;
    }
    for (double e = 1e-3; e > 5e-7; e *= 0.1) {
        if (!pred(a + (b - a) * e) || !pred(b - (b - a) * e)) return false;
    }
    for (double u : extra) {
        if (u > lo && u < hi && !pred(u)) return false;
    }
    return true;
}

// v - vm < rise, allowing a few ulps so tangent endpoints are not rejected by rounding
bool below_chord(double v, double vm, double rise)
{
    double slack = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(v) + std::abs(vm) + std::abs(rise));
    return (v - vm) - rise < slack;
}

} // namespace

const char* to_string(WaveKind k)
{
    switch (k) {
    case WaveKind::ScS: return "ScS";
    case WaveKind::ScR: return "ScR";
    case WaveKind::AR: return "AR";
    case WaveKind::DS: return "DS";
    case WaveKind::ScAS: return "ScAS";
    case WaveKind::ScDS: return "ScDS";
    case WaveKind::ST: return "ST";
    }
    return "?";
}

WaveKind wave_kind_from_string(const std::string& s)
{
    for (WaveKind k : {WaveKind::ScS, WaveKind::ScR, WaveKind::AR, WaveKind::DS, WaveKind::ScAS, WaveKind::ScDS, WaveKind::ST})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown wave kind '" + s + "'");
}

bool is_rarefaction(WaveKind k) { return k == WaveKind::ScR || k == WaveKind::AR; }

double shock_speed(const CurveFamily& fam, const HState& left, const HState& right)
{
    double du = right.u - left.u;
    if (std::abs(du) < 1e-14) throw DomainError("shock_speed: degenerate jump");
    double dv = velocity(fam, right) - velocity(fam, left);
    if (dv == 0.0) return 0.0;
    return -dv / du;
}

bool chord_s2a(const CurveFamily& fam, const HState& left, double u_plus, int n_samples)
{
    const double um = left.u, hm = left.h;
    const double du = u_plus - um;
    if (!(du > kZeroStrength)) return false;
    if (u_plus <= fam.uA(hm)) return false;
    const double vm = velocity(fam, left);
    const double c = (fam.vA(u_plus) - vm) / du;
    return all_samples(um, u_plus, n_samples, {fam.uA(hm), fam.uD(hm)}, [&](double u) {
        double d = u - um;
        return below_chord(velocity(fam, u, hm), vm, c * d) && below_chord(fam.vA(u), vm, c * d);
    });
}

bool chord_s2d(const CurveFamily& fam, const HState& left, double u_plus, int n_samples)
{
    const double um = left.u, hm = left.h;
    const double du = u_plus - um;
    if (!(du < -kZeroStrength)) return false;
    if (u_plus >= fam.uD(hm)) return false;
    if (u_plus < 1.0) return false;
    const double vm = velocity(fam, left);
    const double c = (fam.vD(u_plus) - vm) / du;
    return all_samples(um, u_plus, n_samples, {fam.uA(hm), fam.uD(hm)}, [&](double u) {
        return below_chord(vm, velocity(fam, u, hm), -c * (u - um));
    });
}

std::optional<std::string> wave_problem(const CurveFamily& fam, WaveKind kind, const HState& left, const HState& right)
{
    if (!in_band(fam, left, kBandTol)) return "left state " + fmt_state(left) + " is out of band";
    if (!in_band(fam, right, kBandTol)) return "right state " + fmt_state(right) + " is out of band";
    const double du = right.u - left.u;
    if (std::abs(du) < kZeroStrength) return std::string("zero-strength wave");
    const bool same_curve = std::abs(left.h - right.h) <= kBandTol;
    switch (kind) {
    case WaveKind::ScS:
        if (!same_curve) return std::string("ScS needs h- = h+");
        if (!(du < 0.0)) return std::string("ScS needs u- > u+");
        break;
    case WaveKind::ScR:
        if (!same_curve) return std::string("ScR needs h- = h+");
        if (!(du > 0.0)) return std::string("ScR needs u- < u+");
        break;
    case WaveKind::AR:
        if (!on_accel(fam, left) || !on_accel(fam, right)) return std::string("AR needs both states on vA");
        if (!(du > 0.0)) return std::string("AR needs u- < u+: no connection is possible");
        break;
    case WaveKind::DS:
        if (!on_decel(fam, left) || !on_decel(fam, right)) return std::string("DS needs both states on vD");
        if (!(du < 0.0)) return std::string("DS needs u- > u+: no connection is possible");
        break;
    case WaveKind::ST:
        if (std::abs(velocity(fam, left) - velocity(fam, right)) > kVelTol) return std::string("ST needs v- = v+");
        break;
    case WaveKind::ScAS:
        if (!on_accel(fam, right)) return std::string("ScAS needs the right state on vA");
        if (!chord_s2a(fam, left, right.u)) return std::string("ScAS chord condition fails");
        break;
    case WaveKind::ScDS:
        if (!on_decel(fam, right)) return std::string("ScDS needs the right state on vD");
        if (!chord_s2d(fam, left, right.u)) return std::string("ScDS chord condition fails");
        break;
    }
    return std::nullopt;
}

Wave make_wave(const CurveFamily& fam, WaveKind kind, const HState& left, const HState& right)
{
    if (auto why = wave_problem(fam, kind, left, right))
        throw InadmissibleWave(std::string(to_string(kind)) + " " + fmt_state(left) + " -> " + fmt_state(right) + ": " + *why);
    Wave w;
    w.kind = kind;
    w.left = left;
    w.right = right;
    if (kind == WaveKind::ScR) {
        w.fan = {-fam.dvS_u(left.u, left.h), -fam.dvS_u(right.u, left.h)};
    } else if (kind == WaveKind::AR) {
        w.fan = {-fam.dvA(left.u), -fam.dvA(right.u)};
    } else if (kind == WaveKind::ST) {
        w.speed = 0.0;
    } else {
        w.speed = shock_speed(fam, left, right);
    }
    return w;
}

HState rarefaction_state(const CurveFamily& fam, const Wave& w, double xi)
{
    if (!is_rarefaction(w.kind)) throw DomainError("rarefaction_state: not a rarefaction");
    const double tol = 1e-14 * std::max(1.0, std::abs(w.fan[0]));
    if (xi < w.fan[0] - tol || xi > w.fan[1] + tol) throw DomainError("rarefaction_state: xi outside the fan");
    if (xi <= w.fan[0]) return w.left;
    if (xi >= w.fan[1]) return w.right;
    if (w.kind == WaveKind::AR) {
        double u = invert_increasing([&](double s) { return -fam.dvA(s); }, xi, w.left.u, w.right.u);
        return {u, fam.hA(u)};
    }
    const double h = w.left.h;
    double u = invert_increasing([&](double s) { return -fam.dvS_u(s, h); }, xi, w.left.u, w.right.u);
    return {u, h};
}

namespace {

ProfileReport integrate_profile(const std::function<double(double)>& G, double du, const ProfileOptions& opts)
{
    ProfileReport rep;
    // Time rescaling by psi keeps tangent (doubly degenerate) ends reachable;
    // the orbit in u is unchanged.
    const double eta = 1e-12;
    auto psi = [&](double w) {
        double a = std::abs(w) + eta, b = std::abs(1.0 - w) + eta;
        return a * a * b * b;
    };
    double lam = 0.0;
    for (int j = 64; j <= 192; ++j) {
        double w = j / 256.0;
        lam = std::max(lam, std::abs(G(w)) / psi(w));
    }
    if (!(lam > 0.0)) {
        rep.note = "flat profile";
        return rep;
    }
    auto rhs = [&](double w) { return G(w) / (lam * psi(w)); };

    const double dt = 0.5 / opts.min_steps;
    const double wmin = -opts.window / std::abs(du), wmax = 1.0 + opts.window / std::abs(du);
    const double stop = 1e-3 * opts.gap_tol / std::abs(du);
    double w = opts.start_offset;
    rep.monotone = rhs(w) > 0.0;
    long n = 0;
    while (rep.monotone && n < opts.max_steps && 1.0 - w > stop) {
        const double r0 = rhs(w);
        if (!(r0 > 0.0)) {
            rep.monotone = false;
            rep.note = "profile reverses";
            break;
        }
        // endpoint proximity: move at most half the distance to the nearer end,
        // halve until every stage stays inside and the step advances
        const double room = 0.5 * std::min(std::abs(w), 1.0 - w);
        double h = std::min(dt, room / r0);
        double wn = w;
        for (int tries = 0; tries < 60; ++tries, h *= 0.5) {
            double a = w + 0.5 * h * r0;
            if (!(a < 1.0)) continue;
            double k2 = rhs(a);
            double b = w + 0.5 * h * k2;
            if (!(b > w && b < 1.0)) continue;
            double k3 = rhs(b);
            double c = w + h * k3;
            if (!(c > w && c < 1.0)) continue;
            double k4 = rhs(c);
            wn = w + h / 6.0 * (r0 + 2.0 * k2 + 2.0 * k3 + k4);
            if (wn > w && wn < 1.0) break;
            wn = w;
        }
        ++n;
        if (wn < wmin || wn > wmax) {
            rep.left_window = true;
            rep.note = "left the integration window";
            w = wn;
            break;
        }
        if (!(wn > w)) {
            if (wn < w) rep.monotone = false;
            rep.note = wn < w ? "profile reverses" : "profile stalls";
            break;
        }
        if (wn - w < 1e-12 * (1.0 - w) && 1.0 - wn > stop) {
            rep.note = "profile stalls";
            w = wn;
            break;
        }
        w = wn;
    }
    if (!rep.monotone && rep.note.empty()) rep.note = "wrong direction at start";
    rep.steps = n;
    rep.max_endpoint_gap = std::abs(1.0 - w) * std::abs(du);
    rep.connected = rep.monotone && !rep.left_window && rep.max_endpoint_gap <= opts.gap_tol;
    return rep;
}

} // namespace

ProfileReport viscous_profile_check(const CurveFamily& fam, const Wave& w, const ProfileOptions& opts)
{
    if (is_rarefaction(w.kind)) {
        ProfileReport r;
        r.note = "rarefaction has no viscous profile";
        return r;
    }
    const double um = w.left.u, up = w.right.u, hm = w.left.h, hp = w.right.h;
    const double du = up - um;
    if (std::abs(du) < kZeroStrength) {
        ProfileReport r;
        r.note = "zero-strength wave";
        return r;
    }
    const double vm = velocity(fam, w.left);
    const double s = w.kind == WaveKind::ST ? 0.0 : w.speed;

    // ST: straight h-path, bowed toward the band edge on the needed side
    const double want = du < 0.0 ? 1.0 : -1.0; // sign of v - v- along the path
    auto edge_h = [&](double u) {
        double ha = fam.hA(u), hd = fam.hD(u);
        double va = velocity(fam, u, ha), vd = velocity(fam, u, hd);
        return (want > 0.0) == (va > vd) ? ha : hd;
    };
    // straight segment pulled toward the edge; the pull vanishes at both ends
    // and gets steeper with each attempt
    auto path_h = [&](double u, double pull) {
        double w = (u - um) / du;
        double hl = hm + (hp - hm) * w;
        return hl + std::min(1.0, pull * 4.0 * w * (1.0 - w)) * (edge_h(u) - hl);
    };

    std::function<double(double)> path_v;
    switch (w.kind) {
    case WaveKind::DS:
        path_v = [&](double u) { return fam.vD(u); };
        break;
    case WaveKind::ScS:
    case WaveKind::ScAS:
    case WaveKind::ScDS:
        path_v = [&](double u) { return velocity(fam, std::max(u, 1.0), hm); };
        break;
    case WaveKind::ST: {
        double chosen = -1.0;
        std::vector<double> ws;
        for (int j = 1; j <= kChordSamples; ++j) ws.push_back(j / (kChordSamples + 1.0));
        for (double e : {1e-6, 1e-4, 1e-2}) {
            ws.push_back(e);
            ws.push_back(1.0 - e);
        }
        for (int k = 0; k <= 8; ++k) {
            double pull = k == 0 ? 0.0 : std::ldexp(1.0, 2 * (k - 1));
            bool ok = true;
            for (std::size_t j = 0; j < ws.size() && ok; ++j) {
                double u = um + du * ws[j];
                ok = want * (velocity(fam, u, path_h(u, pull)) - vm) > 0.0;
            }
            if (ok) {
                chosen = pull;
                break;
            }
        }
        if (chosen < 0.0) {
            ProfileReport r;
            r.note = "no admissible stationary path after 8 blends";
            return r;
        }
        path_v = [&, chosen](double u) {
            return velocity(fam, std::max(u, 1.0), std::max(path_h(u, chosen), 1.0));
        };
        break;
    }
    default:
        break;
    }

    auto G = [&](double wn) {
        double u = um + wn * du;
        return (-s * (u - um) - (path_v(u) - vm)) / du;
    };
    return integrate_profile(G, du, opts);
}

} // namespace hlwr
