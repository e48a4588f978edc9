#include "hlwr/fv_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hlwr/errors.hpp"

namespace hlwr {

namespace {

constexpr double kBandSlack = 1e-9;

HState datum_at(const Datum& d, double x)
{
    auto k = static_cast<std::size_t>(std::upper_bound(d.jumps.begin(), d.jumps.end(), x) - d.jumps.begin());
    return d.states[k];
}

// Steepest slope met by cell state s while it brakes toward velocity v_next:
// down its scanning curve, then down v^D. Concave branches are steepest at
// the low end, so that end is enough.
double braking_slope(const CurveFamily& fam, const HState& s, double v_next)
{
    const double lo = fam.uD(s.h);
    if (v_next >= fam.vS(lo, s.h)) return fam.dvS_u(inv_vS(fam, v_next, s.h), s.h);
    return std::max(fam.dvS_u(lo, s.h), fam.dvD(inv_vD(fam, v_next)));
}

} // namespace

GridState make_grid(const CurveFamily& fam, const Datum& data, double x_lo, double x_hi, double dx, bool ring)
{
    if (!(dx > 0.0)) throw ConfigError("make_grid: dx must be positive");
    if (!(x_hi > x_lo)) throw ConfigError("make_grid: empty interval");
    if (data.states.size() != data.jumps.size() + 1) throw ConfigError("make_grid: need one more state than jumps");
    GridState g;
    g.dx = dx;
    g.x_lo = x_lo;
    g.ring = ring;
    const auto n = static_cast<std::size_t>(std::llround((x_hi - x_lo) / dx));
    if (n == 0) throw ConfigError("make_grid: no cells");
    for (std::size_t i = 0; i < n; ++i) {
        HState s = datum_at(data, g.center(i));
        if (!in_band(fam, s)) throw DomainError("make_grid: datum state out of band");
        g.u.push_back(s.u);
        g.h.push_back(s.h);
    }
    g.right_ghost = data.states.back();
    return g;
}

double cfl_dt(const CurveFamily& fam, const GridState& g, double cfl)
{
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl_dt: cfl must lie in (0, 1]");
    if (g.size() == 0) throw ConfigError("cfl_dt: empty grid");
    const auto v = velocities(fam, g);
    const double v_ghost = g.ring ? v.front() : velocity(fam, g.right_ghost);
    double smax = g.ring ? 0.0 : branch_slope(fam, g.right_ghost);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const HState s = g.state(i);
        smax = std::max(smax, branch_slope(fam, s));
        const double v_next = i + 1 < g.size() ? v[i + 1] : v_ghost;
        if (v_next < v[i]) smax = std::max(smax, braking_slope(fam, s, v_next));
    }
    if (!(smax > 0.0)) throw DomainError("cfl_dt: degenerate grid, all branch slopes vanish");
    return cfl * g.dx / smax;
}

double update_hysteresis(const CurveFamily& fam, double /*u_old*/, double h_old, double u_new)
{
    if (u_new > fam.uA(h_old)) return fam.hA(u_new);
    if (u_new < fam.uD(h_old)) return fam.hD(u_new);
    return h_old;
}

std::vector<double> velocities(const CurveFamily& fam, const GridState& g)
{
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = velocity(fam, g.u[i], g.h[i]);
    return v;
}

GridState step(const CurveFamily& fam, const GridState& g, double dt, double* clamp)
{
    const std::size_t n = g.size();
    const auto v = velocities(fam, g);
    const double v_ghost = g.ring ? v.front() : velocity(fam, g.right_ghost);
    const double lam = dt / g.dx;
    GridState out = g;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v_next = i + 1 < n ? v[i + 1] : v_ghost;
        double u_new = g.u[i] + lam * (v_next - v[i]);
        if (!(u_new >= 1.0)) throw DomainError("step: cell " + std::to_string(i) + " spacing fell below 1");
        double h_new = update_hysteresis(fam, g.u[i], g.h[i], u_new);
        const double lo = fam.uD(h_new), hi = fam.uA(h_new);
        double miss = std::max({lo - u_new, u_new - hi, 0.0});
        if (miss > kBandSlack)
            throw DomainError("step: cell " + std::to_string(i) + " leaves the band by " + std::to_string(miss));
        worst = std::max(worst, miss);
        out.u[i] = std::clamp(u_new, lo, hi);
        out.h[i] = h_new;
    }
    out.t = g.t + dt;
    if (clamp) *clamp = worst;
    return out;
}

double total_variation_v(const CurveFamily& fam, const GridState& g)
{
    const auto v = velocities(fam, g);
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) tv += std::abs(v[i + 1] - v[i]);
    if (g.ring && v.size() > 1) tv += std::abs(v.front() - v.back());
    return tv;
}

double sup_deviation_v(const CurveFamily& fam, const GridState& g, double v_ref)
{
    double d = 0.0;
    for (double v : velocities(fam, g)) d = std::max(d, std::abs(v - v_ref));
    return d;
}

FvRun run(const CurveFamily& fam, const GridState& g0, double t_end, double cfl, const FvObservers& obs)
{
    FvRun res;
    GridState g = g0;
    std::vector<double> snaps = obs.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    double next_series = g.t;

    auto observe = [&] {
        if (g.t + 1e-12 >= next_series) {
            res.series.push_back({g.t, total_variation_v(fam, g), sup_deviation_v(fam, g, obs.v_ref)});
            next_series = obs.series_dt > 0.0 ? next_series + obs.series_dt : g.t;
        }
        while (next_snap < snaps.size() && snaps[next_snap] <= g.t + 1e-12) {
            GridState s = g;
            s.t = snaps[next_snap++];
            res.snapshots.push_back(std::move(s));
        }
    };

    observe();
    while (g.t < t_end) {
        double dt = cfl_dt(fam, g, cfl);
        double target = t_end;
        if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
        if (g.t + dt >= target) dt = target - g.t;
        if (!(dt > 0.0)) break;
        double clamp = 0.0;
        GridState nxt = step(fam, g, dt, &clamp);
        if (target - nxt.t < 1e-12 * std::max(1.0, std::abs(target))) nxt.t = target;
        g = std::move(nxt);
        res.max_clamp = std::max(res.max_clamp, clamp);
        ++res.steps;
        if (obs.series_dt == 0.0) next_series = g.t;
        observe();
    }
    res.final_grid = g;
    return res;
}

} // namespace hlwr
