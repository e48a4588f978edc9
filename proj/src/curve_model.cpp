#include "hlwr/curve_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hlwr/errors.hpp"
#include "hlwr/numerics.hpp"

namespace hlwr {

namespace {

constexpr double kBandTol = 1e-9;

double grow_upper(const Fn1& g, double target, double lo)
{
    double hi = std::max(2.0 * lo, lo + 1.0);
    while (g(hi) < target) {
        hi *= 2.0;
        if (hi > 1e12) throw DomainError("curve inverse: velocity out of range");
    }
    return hi;
}

} // namespace

CurveFamily make_custom_family(const CustomParams& p, std::string name)
{
    if (!(p.vbar > 0.0)) throw ConfigError("family: vbar must be positive");
    if (!(p.u0A > 1.0)) throw ConfigError("family: u0A must exceed 1");
    if (!(p.beta > 1.0)) throw ConfigError("family: beta must exceed 1");

    CurveFamily f;
    f.name = std::move(name);
    f.vbar = p.vbar;
    f.u0A = p.u0A;
    f.u_c = p.u0A * p.u0A;
    f.h_c = f.u_c;
    f.v_c = p.vbar * (1.0 - 1.0 / f.u_c);

    const double vbar = p.vbar, u0A = p.u0A, hc = f.h_c;
    const double a = p.band_congested, b = p.band_free, beta = p.beta;

    f.vD = [vbar](double u) { return vbar * (1.0 - 1.0 / u); };
    f.dvD = [vbar](double u) { return vbar / (u * u); };
    f.vA = [vbar, u0A](double u) { return vbar * std::max(0.0, 1.0 - (u0A / u) * (u0A / u)); };
    f.dvA = [vbar, u0A](double u) { return u > u0A ? 2.0 * vbar * u0A * u0A / (u * u * u) : 0.0; };

    f.uD = [](double h) { return h; };
    f.hD = [](double u) { return u; };
    f.uA = [u0A, hc, a, b](double h) {
        if (h <= hc) return u0A * std::sqrt(h) * (1.0 + a * (1.0 - h / hc));
        return h + b * (h - hc);
    };
    auto uA = f.uA;
    f.hA = [uA, hc, b](double u) {
        if (u <= uA(1.0)) return 1.0;
        if (u > hc) return (u + b * hc) / (1.0 + b);
        return bisect([&](double h) { return uA(h) - u; }, 1.0, hc);
    };

    auto vA = f.vA, vD = f.vD, dvA = f.dvA, dvD = f.dvD;
    auto shape = [beta](double t) { return t * (beta - t) / (beta - 1.0); };
    auto dshape = [beta](double t) { return (beta - 2.0 * t) / (beta - 1.0); };
    f.vS = [=](double u, double h) {
        double lo = h, hi = uA(h);
        double base = vD(lo);
        double w = hi - lo;
        if (std::abs(w) < 1e-14) return base;
        return base + (vA(hi) - base) * shape((u - lo) / w);
    };
    f.dvS_u = [=](double u, double h) {
        double lo = h, hi = uA(h);
        double w = hi - lo;
        if (std::abs(w) < 1e-14) return 0.5 * (dvD(lo) + dvA(lo));
        return (vA(hi) - vD(lo)) * dshape((u - lo) / w) / w;
    };
    return f;
}

CurveFamily make_default_family()
{
    return make_custom_family(CustomParams{}, "default-concave-v1");
}

CurveFamily family_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("family: expected a JSON object");
    if (j.contains("builtin")) {
        auto name = j.at("builtin").get<std::string>();
        if (name != "default-concave-v1") throw ConfigError("family: unknown builtin '" + name + "'");
        return make_default_family();
    }
    if (j.contains("custom")) {
        const auto& c = j.at("custom");
        CustomParams p;
        for (auto it = c.begin(); it != c.end(); ++it) {
            const auto& k = it.key();
            double val = it.value().get<double>();
            if (k == "vbar") p.vbar = val;
            else if (k == "u0A") p.u0A = val;
            else if (k == "band_congested") p.band_congested = val;
            else if (k == "band_free") p.band_free = val;
            else if (k == "beta") p.beta = val;
            else throw ConfigError("family: unknown custom parameter '" + k + "'");
        }
        return make_custom_family(p, j.value("name", std::string("custom")));
    }
    throw ConfigError("family: need 'builtin' or 'custom'");
}

CurveFamily load_family(const std::string& path_or_builtin)
{
    if (path_or_builtin.empty() || path_or_builtin == "default-concave-v1" || path_or_builtin == "builtin")
        return make_default_family();
    std::ifstream in(path_or_builtin);
    if (!in) throw ConfigError("family: cannot open '" + path_or_builtin + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("family: ") + e.what());
    }
    return family_from_json(j);
}

const char* to_string(DriverMode m)
{
    switch (m) {
    case DriverMode::Acceleration: return "Acceleration";
    case DriverMode::Deceleration: return "Deceleration";
    case DriverMode::Scanning: return "Scanning";
    }
    return "?";
}

double velocity(const CurveFamily& fam, double u, double h)
{
    if (!(u >= 1.0) || !(h >= 1.0)) {
        std::ostringstream os;
        os << "velocity: state (" << u << ", " << h << ") outside u >= 1, h >= 1";
        throw DomainError(os.str());
    }
    if (u <= fam.uD(h)) return fam.vD(u);
    if (u >= fam.uA(h)) return fam.vA(u);
    return fam.vS(u, h);
}

double velocity(const CurveFamily& fam, const HState& s) { return velocity(fam, s.u, s.h); }

double branch_slope(const CurveFamily& fam, const HState& s)
{
    double lo = fam.uD(s.h), hi = fam.uA(s.h);
    if (std::abs(s.u - hi) <= kBandTol) return std::max(fam.dvS_u(hi, s.h), fam.dvA(s.u));
    if (std::abs(s.u - lo) <= kBandTol) return std::max(fam.dvS_u(lo, s.h), fam.dvD(s.u));
    if (s.u < lo) return fam.dvD(s.u);
    if (s.u > hi) return fam.dvA(s.u);
    return fam.dvS_u(s.u, s.h);
}

DriverMode mode_of(const CurveFamily& fam, const HState& s, int du_dt_sign)
{
    double hi = fam.uA(s.h), lo = fam.uD(s.h);
    if (du_dt_sign > 0 && std::abs(s.u - hi) <= 1e-12 * std::max(1.0, std::abs(hi))) return DriverMode::Acceleration;
    if (du_dt_sign < 0 && std::abs(s.u - lo) <= 1e-12 * std::max(1.0, std::abs(lo))) return DriverMode::Deceleration;
    return DriverMode::Scanning;
}

bool in_band(const CurveFamily& fam, const HState& s, double tol)
{
    if (s.u < 1.0 || s.h < 1.0) return false;
    return s.u >= fam.uD(s.h) - tol && s.u <= fam.uA(s.h) + tol;
}

bool on_accel(const CurveFamily& fam, const HState& s, double tol) { return std::abs(s.u - fam.uA(s.h)) <= tol; }
bool on_decel(const CurveFamily& fam, const HState& s, double tol) { return std::abs(s.u - fam.uD(s.h)) <= tol; }

double inv_vA(const CurveFamily& fam, double v)
{
    double lo = fam.u0A;
    if (v <= fam.vA(lo)) return lo;
    if (v >= fam.vbar) throw DomainError("inv_vA: velocity at or above vbar");
    return invert_increasing(fam.vA, v, lo, grow_upper(fam.vA, v, lo));
}

double inv_vD(const CurveFamily& fam, double v)
{
    if (v < fam.vD(1.0)) throw DomainError("inv_vD: velocity below vD(1)");
    if (v >= fam.vbar) throw DomainError("inv_vD: velocity at or above vbar");
    return invert_increasing(fam.vD, v, 1.0, grow_upper(fam.vD, v, 1.0));
}

double inv_vS(const CurveFamily& fam, double v, double h)
{
    double lo = fam.uD(h), hi = fam.uA(h);
    return invert_increasing([&](double u) { return fam.vS(u, h); }, v, lo, hi);
}

HState state_on_scanning(const CurveFamily& fam, double h, double v)
{
    double lo = fam.uD(h), hi = fam.uA(h);
    if (v < fam.vD(lo) - kBandTol || v > fam.vA(hi) + kBandTol)
        throw DomainError("state_on_scanning: velocity outside the scanning range");
    return {inv_vS(fam, v, h), h};
}

HState state_on_accel(const CurveFamily& fam, double u) { return {u, fam.hA(u)}; }
HState state_on_decel(const CurveFamily& fam, double u) { return {u, fam.hD(u)}; }

HState state_at(const CurveFamily& fam, double u, double v)
{
    double ha = fam.hA(u), hd = fam.hD(u);
    double va = velocity(fam, u, ha), vd = velocity(fam, u, hd);
    double vmin = std::min(va, vd), vmax = std::max(va, vd);
    if (v < vmin - kBandTol || v > vmax + kBandTol) throw DomainError("state_at: velocity outside the band at this spacing");
    if (std::abs(v - va) <= 0.0) return {u, ha};
    if (std::abs(v - vd) <= 0.0) return {u, hd};
    double sign = vd > va ? 1.0 : -1.0;
    auto g = [&](double h) { return sign * (velocity(fam, u, h) - v); };
    if (g(ha) >= 0.0) return {u, ha};
    if (g(hd) <= 0.0) return {u, hd};
    return {u, bisect(g, ha, hd)};
}

HState from_eulerian(double rho, double h)
{
    if (!(rho > 0.0)) throw DomainError("from_eulerian: density must be positive");
    if (rho > 1.0) throw DomainError("from_eulerian: density above rho_max = 1");
    return {1.0 / rho, h};
}

std::pair<double, double> to_eulerian(const HState& s)
{
    if (!(s.u >= 1.0)) throw DomainError("to_eulerian: spacing below 1");
    return {1.0 / s.u, s.h};
}

std::vector<std::pair<std::string, int>> ValidationReport::summary() const
{
    std::vector<std::pair<std::string, int>> out;
    for (const auto& v : violations) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == v.check; });
        if (it == out.end()) out.emplace_back(v.check, 1);
        else ++it->second;
    }
    return out;
}

bool ValidationReport::has(const std::string& check) const
{
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.check == check; });
}

ValidationReport validate_family(const CurveFamily& fam, int grid_n, const FamilyWindow& win)
{
    if (grid_n < 2) throw DomainError("validate_family: grid_n must be at least 2");
    ValidationReport rep;
    auto flag = [&](const char* check, double u, double h, double amount) {
        rep.violations.push_back({check, u, h, amount});
    };
    const double tol = 1e-9;
    const int n = grid_n;

    // single crossing of the extremal curves
    if (double d = std::abs(fam.vA(fam.u_c) - fam.vD(fam.u_c)); d > tol) flag("crossing", fam.u_c, fam.h_c, d);
    if (double d = std::abs(fam.uA(fam.h_c) - fam.u_c); d > tol) flag("crossing", fam.u_c, fam.h_c, d);
    if (double d = std::abs(fam.uD(fam.h_c) - fam.u_c); d > tol) flag("crossing", fam.u_c, fam.h_c, d);

    // extremal curves
    for (int i = 0; i < n; ++i) {
        double u = win.u_lo + (win.u_hi - win.u_lo) * i / (n - 1);
        if (fam.dvD(u) <= 0.0) flag("monotonicity", u, 0.0, fam.dvD(u));
        if (u > fam.u0A && fam.dvA(u) <= 0.0) flag("monotonicity", u, 0.0, fam.dvA(u));
        if (i > 0) {
            double up = win.u_lo + (win.u_hi - win.u_lo) * (i - 1) / (n - 1);
            double dd = fam.dvD(u) - fam.dvD(up);
            if (dd > tol * std::max(1.0, std::abs(fam.dvD(u)))) flag("concavity", u, 0.0, dd);
            if (up > fam.u0A) {
                double da = fam.dvA(u) - fam.dvA(up);
                if (da > tol * std::max(1.0, std::abs(fam.dvA(u)))) flag("concavity", u, 0.0, da);
            }
            if ((u - fam.u_c) * (up - fam.u_c) < 0.0 || u == fam.u_c) continue;
            double gap = fam.vA(u) - fam.vD(u);
            if (std::abs(gap) <= tol) flag("crossing", u, 0.0, gap);
        }
    }

    // per scanning curve
    for (int i = 0; i < n; ++i) {
        double h = win.h_lo + (win.h_hi - win.h_lo) * i / (n - 1);
        double lo = fam.uD(h), hi = fam.uA(h);
        double width = hi - lo;
        if (width < -tol) flag("band-ordering", lo, h, width);
        else if (std::abs(h - fam.h_c) > 1e-6 * std::max(1.0, fam.h_c) && width <= 0.0) flag("band-ordering", lo, h, width);

        if (double d = std::abs(fam.hA(hi) - h); d > 1e-10 && h >= 1.0) flag("inverse", hi, h, d);
        if (double d = std::abs(fam.hD(lo) - h); d > 1e-10) flag("inverse", lo, h, d);

        if (width <= 1e-6) continue;
        if (double d = std::abs(fam.vS(hi, h) - fam.vA(hi)); d > tol) flag("junction-continuity", hi, h, d);
        if (double d = std::abs(fam.vS(lo, h) - fam.vD(lo)); d > tol) flag("junction-continuity", lo, h, d);
        if (fam.dvS_u(hi, h) <= 0.0) flag("slope-compatibility", hi, h, fam.dvS_u(hi, h));
        if (fam.dvS_u(lo, h) <= 0.0) flag("slope-compatibility", lo, h, fam.dvS_u(lo, h));

        double prev_v = 0.0, prev_d = 0.0;
        for (int j = 0; j < n; ++j) {
            double u = lo + width * j / (n - 1);
            double v = fam.vS(u, h);
            double d = fam.dvS_u(u, h);
            if (j > 0 && j < n - 1 && d <= 0.0) flag("monotonicity", u, h, d);
            if (j > 0) {
                if (v - prev_v <= 0.0) flag("monotonicity", u, h, v - prev_v);
                if (d - prev_d > tol * std::max(1.0, std::abs(d))) flag("concavity", u, h, d - prev_d);
            }
            if (j > 0 && j < n - 1) {
                double e = 1e-6 * width;
                double fd = (fam.vS(u + e, h) - fam.vS(u - e, h)) / (2.0 * e);
                if (std::abs(fd - d) > 1e-4 * std::max(1.0, std::abs(d))) flag("derivative-consistency", u, h, fd - d);
            }
            prev_v = v;
            prev_d = d;
        }
    }

    // ordering of scanning curves at fixed spacing: increasing in h on the
    // congested side, decreasing on the free side
    for (int iu = 0; iu < n; ++iu) {
        double u = win.u_lo + (win.u_hi - win.u_lo) * iu / (n - 1);
        if (std::abs(u - fam.u_c) < 1e-6) continue;
        double sign = u < fam.u_c ? 1.0 : -1.0;
        bool have = false;
        double prev = 0.0, prev_h = 0.0;
        for (int ih = 0; ih < n; ++ih) {
            double h = win.h_lo + (win.h_hi - win.h_lo) * ih / (n - 1);
            if (u < fam.uD(h) || u > fam.uA(h)) {
                have = false;
                continue;
            }
            double v = fam.vS(u, h);
            if (have && sign * (v - prev) <= 0.0) flag("h-ordering", u, 0.5 * (h + prev_h), v - prev);
            have = true;
            prev = v;
            prev_h = h;
        }
    }

    rep.pass = rep.violations.empty();
    return rep;
}

} // namespace hlwr
