#include "hlwr/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hlwr/errors.hpp"
#include "hlwr/riemann.hpp"
#include "hlwr/scalar_lwr.hpp"

namespace hlwr {

namespace {

constexpr double kVelTol = 1e-9;
constexpr std::size_t kMaxEvents = 500000;

// Fixed scenario constants, not overridable.
constexpr double kBottleneckBand = 0.95; // v-bar as a fraction of the band above v^A
constexpr double kMidBand = 0.5;
constexpr double kModerateDeviation = 0.0057;
constexpr double kModerateHalfWidth = 5.0;
constexpr double kOverbrakeV2 = 0.4;
constexpr double kTransientFraction = 0.05;
constexpr double kDecayTimes[] = {10.0, 20.0, 40.0, 80.0};

using Params = std::map<std::string, double>;
using Measured = std::map<std::string, double>;

ParamSpec P(std::string n, double v, double lo, double hi, std::string meaning)
{
    return {std::move(n), v, lo, hi, std::move(meaning)};
}

CheckSpec C(std::string n, std::string rel, double e, double tol = 0.0)
{
    return {std::move(n), std::move(rel), e, tol};
}

std::vector<ScenarioInfo> build_catalog()
{
    std::vector<ScenarioInfo> cat;
    cat.push_back({"car_train",
                   "both",
                   "Cars at one common speed with uneven spacing stay put.",
                   {P("v1", 0.6, 0.59, 0.61, "common velocity"), P("t_end", 50, 1, 1e4, "horizon"),
                    P("dx", 0.25, 1e-3, 1, "cell size (cars)")},
                   {C("tracking_events", "==", 0), C("tracking_moving_fronts", "==", 0),
                    C("tracking_max_change", "<=", 0), C("fv_max_change_u", "<=", 1e-12),
                    C("fv_max_dev_v", "<=", 1e-12)}});
    cat.push_back({"stop_and_go",
                   "tracking",
                   "Jam on v^D between two fast zones on v^A travels upstream rigidly.",
                   {P("u_bar", 3.5, 2.5, 3.9, "fast spacing on v^A"), P("v1", 0.5, 0.2, 0.6, "jam velocity on v^D"),
                    P("t_end", 10, 0.1, 1e4, "horizon")},
                   {C("front_count", "==", 2), C("speed_mismatch", "<=", 1e-14), C("max_front_speed", "<", 0),
                    C("events", "==", 0), C("shift_error", "<=", 1e-9)}});
    cat.push_back({"temp_bottleneck",
                   "both",
                   "A few slow cars in a uniform congested train leave a persistent stop-and-go wave.",
                   {P("u_bar", 2.2, 2.0, 2.3, "background spacing"), P("v1", 0.315, 0.2, 0.4, "velocity of the slow cars"),
                    P("delta_v", 1e-3, 1e-5, 0.05, "rarefaction step"), P("dx", 0.0025, 1e-3, 0.1, "FV cell size"),
                    P("t_end", 40, 5, 1e4, "horizon")},
                   {C("interaction_events", "==", 1), C("horizon_over_t1", ">=", 10),
                    C("scas_minus_scds_speed", ">", 0), C("pending_interaction", "==", 0),
                    C("fv_l1_t5", "<", 0.05)}});
    cat.push_back({"ring_road",
                   "both",
                   "Strong braking on a ring settles into two zones; moderate braking decays under FV.",
                   {P("L", 100, 20, 1000, "ring length (cars)"), P("u_bar", 2.2, 2.0, 2.3, "background spacing"),
                    P("v1", 0.315, 0.2, 0.4, "velocity of the slow cars"), P("delta_v", 1e-3, 1e-5, 0.05, "rarefaction step"),
                    P("dx", 1, 0.1, 5, "FV cell size"), P("t_end", 1e5, 100, 1e6, "horizon")},
                   {C("events", ">=", 1), C("velocity_levels_final", "==", 2), C("final_fronts", "==", 2),
                    C("final_scds", "==", 1), C("final_scas", "==", 1), C("pair_speed_gap", "<=", 1e-12),
                    C("pending_interaction", "==", 0), C("tv_increase_after_transient", "<=", 1e-14),
                    C("tv_final_ratio", "<", 0.1), C("mass_drift", "<=", 1e-10)}});
    cat.push_back({"free_zone_disturbance",
                   "tracking",
                   "Slow cars in a free-flowing train are absorbed in finite time.",
                   {P("u_bar", 6, 4.5, 10, "background spacing on v^D"), P("v1", 0.4, 0.2, 0.7, "velocity of the slow cars on v^D"),
                    P("delta_v", 1e-3, 1e-5, 0.05, "rarefaction step"), P("t_end", 200, 10, 1e4, "horizon")},
                   {C("velocity_spread_final", "<=", kVelTol), C("spacing_plateaus", "==", 2)}});
    cat.push_back({"decay_sparse_upstream",
                   "tracking",
                   "A stop-and-go wave running into sparse upstream traffic dies out.",
                   {P("u_bar", 8, 5, 20, "upstream spacing on v^D"), P("v1", 0.5, 0.3, 0.6, "jam velocity on v^D"),
                    P("delta_v", 1e-3, 1e-5, 0.05, "rarefaction step"), P("t_end", 200, 10, 1e4, "horizon")},
                   {C("slow_zone_final", "<=", 0), C("slow_zone_initial", ">", 0)}});
    cat.push_back({"faster_downstream",
                   "tracking",
                   "A stop-and-go wave behind faster downstream traffic dies out.",
                   {P("u_bar", 6, 4.5, 20, "downstream spacing on v^A"), P("v1", 0.5, 0.3, 0.6, "jam velocity on v^D"),
                    P("delta_v", 1e-3, 1e-5, 0.05, "rarefaction step"), P("t_end", 200, 10, 1e4, "horizon")},
                   {C("slow_zone_final", "<=", 0), C("slow_zone_initial", ">", 0)}});
    cat.push_back({"small_perturbation",
                   "tracking",
                   "A slight slowdown inside the scanning band decays; the slow cars keep a wider spacing.",
                   {P("u_bar", 3, 2.5, 3.5, "background spacing"), P("v1", 0.6054, 0.56, 0.611, "velocity of the slow cars"),
                    P("delta_v", 1e-4, 1e-6, 1e-2, "rarefaction step"), P("t_end", 40000, 100, 1e6, "horizon")},
                   {C("decay_ratio_10_20", "==", 0.525, 0.175), C("decay_ratio_20_40", "==", 0.525, 0.175),
                    C("decay_ratio_40_80", "==", 0.525, 0.175), C("spacing_plateaus", "==", 2),
                    C("slow_cars_widening", ">", 0), C("slow_cars_spread", "<=", 1e-12)}});
    cat.push_back({"underspeed_on_vD",
                   "tracking",
                   "Slow cars on v^D open a slow zone that keeps growing; LWR on v^D erases it.",
                   {P("u_bar", 3, 2.2, 3.9, "background spacing on v^D"), P("v1", 0.5, 0.2, 0.66, "velocity of the slow cars on v^D"),
                    P("delta_v", 1e-3, 1e-5, 0.05, "rarefaction step"), P("t_end", 10, 2, 1e3, "horizon")},
                   {C("growth_r2", ">=", 0.99), C("growth_rate_rel_error", "<=", 0.1),
                    C("lwr_slow_zone_final", "<=", 0)}});
    cat.push_back({"over_braking",
                   "tracking",
                   "Over-braking at one jump leaves a persistent jam; the rational solver does not.",
                   {P("u_bar", 3, 2.5, 3.5, "background spacing"), P("v1", 0.6054, 0.56, 0.611, "velocity of the slow cars"),
                    P("delta_v", 1e-4, 1e-6, 1e-2, "rarefaction step"), P("t_end", 2000, 100, 1e5, "horizon")},
                   {C("ob_zone_final", ">", 0), C("ob_zone_growth", ">=", 0), C("rational_zone_final", "<=", 0)}});
    return cat;
}

Params resolve(const ScenarioInfo& info, const std::map<std::string, double>& overrides)
{
    Params p;
    for (const auto& ps : info.params) p[ps.name] = ps.value;
    for (const auto& [k, v] : overrides) {
        auto it = std::find_if(info.params.begin(), info.params.end(), [&](const ParamSpec& s) { return s.name == k; });
        if (it == info.params.end()) throw ConfigError(info.name + ": parameter '" + k + "' is not declared");
        if (!(v >= it->min && v <= it->max))
            throw ConfigError(info.name + ": parameter '" + k + "' outside [" + std::to_string(it->min) + ", " +
                              std::to_string(it->max) + "]");
        p[k] = v;
    }
    return p;
}

std::vector<double> quarter_times(double t_end) { return {0.0, 0.25 * t_end, 0.5 * t_end, 0.75 * t_end, t_end}; }

double band_velocity(const CurveFamily& fam, double u, double frac)
{
    const double lo = velocity(fam, u, fam.hA(u));
    return lo + frac * (fam.vD(u) - lo);
}

double max_v_dev(const CurveFamily& fam, const FrontSet& fs, double v_ref)
{
    double d = 0.0;
    for (const auto& s : fs.states) d = std::max(d, std::abs(velocity(fam, s) - v_ref));
    return d;
}

std::size_t count_kind(const FrontSet& fs, WaveKind k)
{
    return static_cast<std::size_t>(
        std::count_if(fs.fronts.begin(), fs.fronts.end(), [&](const Front& f) { return f.kind == k; }));
}

std::optional<double> speed_of(const FrontSet& fs, WaveKind k)
{
    for (const auto& f : fs.fronts)
        if (f.kind == k) return f.speed;
    return std::nullopt;
}

// First event time after which pred holds for the set (0 if it holds initially, -1 if never).
double first_time(const TrackedSolution& sol, const std::function<bool(const FrontSet&)>& pred)
{
    if (pred(sol.initial)) return 0.0;
    double found = -1.0;
    replay(sol, [&](const FrontSet& fs, const Event& ev) {
        if (found < 0.0 && pred(fs)) found = ev.t;
    });
    return found;
}

TrackOptions track_opts(const Params& p)
{
    TrackOptions o;
    if (p.count("delta_v")) o.delta_v = p.at("delta_v");
    return o;
}

struct Ctx {
    const CurveFamily& fam;
    Params p;
    Measured m;
    std::map<std::string, double> metrics;
    ScenarioResult res;
};

TrackedSolution track(Ctx& c, const std::string& label, const Datum& d, const Topology& topo, double t_end,
                      const TrackOptions& o)
{
    auto fs = init_fronts(c.fam, d, topo, o);
    auto sol = evolve(c.fam, fs, t_end, kMaxEvents, o, c.res.snapshot_times);
    if (sol.budget_exceeded) throw NoSolution(label + ": event budget exceeded");
    c.res.tracked[label] = sol;
    return sol;
}

void run_car_train(Ctx& c)
{
    const double v0 = c.p["v1"], T = c.p["t_end"];
    std::vector<HState> st;
    for (double u : {2.6, 3.0, 2.8, 3.1}) st.push_back(state_at(c.fam, u, v0));
    Datum d{{-2.0, -1.0, 0.0}, st};
    auto sol = track(c, "tracking", d, Topology::open(), T, {});
    c.m["tracking_events"] = static_cast<double>(sol.events.size());
    c.m["tracking_moving_fronts"] = static_cast<double>(std::count_if(
        sol.final_set.fronts.begin(), sol.final_set.fronts.end(), [](const Front& f) { return f.speed != 0.0; }));
    std::vector<double> xs;
    for (int i = 0; i <= 600; ++i) xs.push_back(-4.0 + 0.01 * i + 0.0013);
    auto a = sample(sol, 0.0, xs), b = sample(sol, T, xs);
    double ch = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) ch = std::max(ch, std::abs(a[i].u - b[i].u) + std::abs(a[i].h - b[i].h));
    c.m["tracking_max_change"] = ch;

    auto g = make_grid(c.fam, d, -4.0, 2.0, c.p["dx"], false);
    FvObservers obs;
    obs.snapshot_times = c.res.snapshot_times;
    obs.v_ref = v0;
    obs.series_dt = T / 100.0;
    auto run_fv = run(c.fam, g, T, 0.9, obs);
    double du = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) du = std::max(du, std::abs(run_fv.final_grid.u[i] - g.u[i]));
    c.m["fv_max_change_u"] = du;
    c.m["fv_max_dev_v"] = sup_deviation_v(c.fam, run_fv.final_grid, v0);
    c.metrics["fv_steps"] = static_cast<double>(run_fv.steps);
    c.res.fv["fv"] = std::move(run_fv);
}

void run_stop_and_go(Ctx& c)
{
    const double T = c.p["t_end"];
    const HState fast = state_on_accel(c.fam, c.p["u_bar"]);
    const HState slow = state_on_decel(c.fam, inv_vD(c.fam, c.p["v1"]));
    auto sol = track(c, "tracking", {{-1.0, 0.0}, {fast, slow, fast}}, Topology::open(), T, {});
    const auto& f0 = sol.initial.fronts;
    c.m["front_count"] = static_cast<double>(f0.size());
    c.m["events"] = static_cast<double>(sol.events.size());
    if (f0.empty()) {
        c.m["speed_mismatch"] = 1.0;
        c.m["max_front_speed"] = 1.0;
        c.m["shift_error"] = 1.0;
        return;
    }
    double smin = f0.front().speed, smax = f0.front().speed;
    for (const auto& f : f0) {
        smin = std::min(smin, f.speed);
        smax = std::max(smax, f.speed);
    }
    c.m["speed_mismatch"] = smax - smin;
    c.m["max_front_speed"] = smax;
    c.metrics["front_speed"] = f0.front().speed;
    const double shift = f0.front().speed * T;
    std::vector<double> now, then;
    for (int i = 0; i <= 3000; ++i) {
        double x = -2.0 + 0.001 * i + 0.00037;
        then.push_back(x);
        now.push_back(x + shift);
    }
    auto a = sample(sol, 0.0, then), b = sample(sol, T, now);
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i].u - b[i].u) + std::abs(a[i].h - b[i].h));
    const auto& fT = sol.final_set.fronts;
    for (std::size_t k = 0; k < std::min(f0.size(), fT.size()); ++k)
        err = std::max(err, std::abs(fT[k].at(T) - (f0[k].at(0.0) + shift)));
    c.m["shift_error"] = err;
}

Datum bottleneck_datum(const CurveFamily& fam, double ub, double v1)
{
    const double vbar = fam.vA(ub) + kBottleneckBand * (fam.vD(ub) - fam.vA(ub));
    const HState s1 = state_at(fam, ub, vbar), s2 = state_at(fam, ub, v1);
    return {{-1.0, 0.0}, {s1, s2, s1}};
}

void run_temp_bottleneck(Ctx& c)
{
    const double T = c.p["t_end"];
    const Datum d = bottleneck_datum(c.fam, c.p["u_bar"], c.p["v1"]);
    const auto o = track_opts(c.p);
    auto sol = track(c, "tracking", d, Topology::open(), T, o);
    const std::size_t n = sol.events.size();
    c.m["interaction_events"] = static_cast<double>(n);
    const double t1 = n ? sol.events.front().t : 0.0;
    c.metrics["t1"] = t1;
    c.m["horizon_over_t1"] = t1 > 0.0 ? T / t1 : 0.0;
    auto sa = speed_of(sol.final_set, WaveKind::ScAS), sd = speed_of(sol.final_set, WaveKind::ScDS);
    c.m["scas_minus_scds_speed"] = sa && sd ? *sa - *sd : -1.0;
    c.m["pending_interaction"] = next_interaction(sol.final_set) ? 1.0 : 0.0;

    constexpr double t_cmp = 5.0;
    FrontSet ref = T >= t_cmp ? front_set_at(sol, t_cmp)
                              : evolve(c.fam, init_fronts(c.fam, d, Topology::open(), o), t_cmp, kMaxEvents, o).final_set;
    ref.t = t_cmp;
    auto g = make_grid(c.fam, d, -6.0, 2.0, c.p["dx"], false);
    FvObservers obs;
    obs.snapshot_times = {0.0, t_cmp};
    obs.series_dt = 0.05;
    obs.v_ref = velocity(c.fam, d.states.front());
    auto r = run(c.fam, g, t_cmp, 0.9, obs);
    c.m["fv_l1_t5"] = l1_distance(c.fam, r.final_grid, ref);
    c.metrics["fv_max_clamp"] = r.max_clamp;
    c.metrics["fv_steps"] = static_cast<double>(r.steps);
    c.res.fv["fv"] = std::move(r);
}

void run_ring_road(Ctx& c)
{
    const double T = c.p["t_end"], L = c.p["L"];
    const Datum d = bottleneck_datum(c.fam, c.p["u_bar"], c.p["v1"]);
    auto sol = track(c, "tracking", d, Topology::make_ring(L), T, track_opts(c.p));
    const auto& F = sol.final_set;
    c.m["events"] = static_cast<double>(sol.events.size());
    if (!sol.events.empty()) c.metrics["last_event_time"] = sol.events.back().t;
    c.m["velocity_levels_final"] = static_cast<double>(velocity_levels(c.fam, F).size());
    c.m["final_fronts"] = static_cast<double>(F.fronts.size());
    c.m["final_scds"] = static_cast<double>(count_kind(F, WaveKind::ScDS));
    c.m["final_scas"] = static_cast<double>(count_kind(F, WaveKind::ScAS));
    double gap = 1.0;
    if (F.fronts.size() == 2) gap = std::abs(F.fronts[0].speed - F.fronts[1].speed);
    c.m["pair_speed_gap"] = gap;
    auto nxt = next_interaction(F);
    c.m["pending_interaction"] = nxt && nxt->t <= T ? 1.0 : 0.0;

    // Moderate braking: a slight slowdown strictly inside the band, solved by FV.
    const double ub = 3.0, vbar = band_velocity(c.fam, ub, kMidBand);
    const HState s1 = state_at(c.fam, ub, vbar), s2 = state_at(c.fam, ub, vbar - kModerateDeviation);
    auto g = make_grid(c.fam, {{-kModerateHalfWidth, kModerateHalfWidth}, {s1, s2, s1}}, -0.5 * L, 0.5 * L, c.p["dx"],
                       true);
    FvObservers obs;
    obs.snapshot_times = c.res.snapshot_times;
    obs.v_ref = vbar;
    obs.series_dt = 0.0;
    auto r = run(c.fam, g, T, 0.9, obs);
    double inc = 0.0;
    for (std::size_t i = 1; i < r.series.size(); ++i)
        if (r.series[i].t >= kTransientFraction * T) inc = std::max(inc, r.series[i].tv_v - r.series[i - 1].tv_v);
    c.m["tv_increase_after_transient"] = inc;
    c.m["tv_final_ratio"] = r.series.back().tv_v / r.series.front().tv_v;
    const double m0 = std::accumulate(g.u.begin(), g.u.end(), 0.0);
    const double m1 = std::accumulate(r.final_grid.u.begin(), r.final_grid.u.end(), 0.0);
    c.m["mass_drift"] = std::abs(m1 - m0) / m0;
    c.metrics["fv_steps"] = static_cast<double>(r.steps);
    c.metrics["fv_max_clamp"] = r.max_clamp;
    c.res.fv["fv_moderate"] = std::move(r);
}

void run_free_zone(Ctx& c)
{
    const double T = c.p["t_end"];
    const HState s1 = state_on_decel(c.fam, c.p["u_bar"]);
    const HState s2 = state_on_decel(c.fam, inv_vD(c.fam, c.p["v1"]));
    auto sol = track(c, "tracking", {{-1.0, 0.0}, {s1, s2, s1}}, Topology::open(), T, track_opts(c.p));
    const double v_bg = velocity(c.fam, s1);
    c.m["velocity_spread_final"] = max_v_dev(c.fam, sol.final_set, v_bg);
    c.metrics["equalization_time"] =
        first_time(sol, [&](const FrontSet& fs) { return max_v_dev(c.fam, fs, v_bg) <= kVelTol; });
    auto ps = pieces(sol.final_set, T);
    auto plateaus = spacing_plateaus(ps);
    c.m["spacing_plateaus"] = static_cast<double>(plateaus.size());
    for (std::size_t k = 0; k < plateaus.size(); ++k) c.metrics["plateau_" + std::to_string(k)] = plateaus[k];
    double umin = ps.front().state.u, umax = umin;
    for (const auto& q : ps) {
        umin = std::min(umin, q.state.u);
        umax = std::max(umax, q.state.u);
    }
    const double tol = 0.1 * (umax - umin);
    double transition = 0.0;
    for (const auto& q : ps) {
        bool near = std::any_of(plateaus.begin(), plateaus.end(), [&](double pv) { return std::abs(q.state.u - pv) <= tol; });
        if (!near) transition += q.b - q.a;
    }
    c.metrics["transition_width"] = transition;
}

void run_decay(Ctx& c, bool upstream)
{
    const double T = c.p["t_end"], v1 = c.p["v1"];
    const HState fast = state_on_accel(c.fam, 3.5);
    const HState slow = state_on_decel(c.fam, inv_vD(c.fam, v1));
    Datum d = upstream ? Datum{{-2.0, -1.0, 0.0}, {state_on_decel(c.fam, c.p["u_bar"]), fast, slow, fast}}
                       : Datum{{-1.0, 0.0}, {fast, slow, state_on_accel(c.fam, c.p["u_bar"])}};
    auto sol = track(c, "tracking", d, Topology::open(), T, track_opts(c.p));
    auto is_slow = [&](const HState& s) { return velocity(c.fam, s) <= v1 + kVelTol; };
    c.m["slow_zone_initial"] = zone_width(sol.initial, 0.0, is_slow);
    c.m["slow_zone_final"] = zone_width(sol.final_set, T, is_slow);
    c.metrics["elimination_time"] = first_time(sol, [&](const FrontSet& fs) { return zone_width(fs, fs.t, is_slow) <= 0.0; });
    c.metrics["events"] = static_cast<double>(sol.events.size());
}

void run_small_perturbation(Ctx& c)
{
    const double T = c.p["t_end"], ub = c.p["u_bar"];
    const double vbar = band_velocity(c.fam, ub, kMidBand);
    const HState s1 = state_at(c.fam, ub, vbar), s2 = state_at(c.fam, ub, c.p["v1"]);
    c.res.snapshot_times = {0.0, 10.0, 20.0, 40.0, 80.0, T};
    std::sort(c.res.snapshot_times.begin(), c.res.snapshot_times.end());
    c.res.snapshot_times.erase(std::unique(c.res.snapshot_times.begin(), c.res.snapshot_times.end()),
                               c.res.snapshot_times.end());
    const double horizon = std::max(T, 80.0);
    auto sol = track(c, "tracking", {{-1.0, 0.0}, {s1, s2, s1}}, Topology::open(), horizon, track_opts(c.p));
    std::vector<double> dev;
    for (double t : kDecayTimes) {
        dev.push_back(max_v_dev(c.fam, front_set_at(sol, t), vbar));
        c.metrics["sup_dev_t" + std::to_string(static_cast<int>(t))] = dev.back();
    }
    c.m["decay_ratio_10_20"] = dev[1] / dev[0];
    c.m["decay_ratio_20_40"] = dev[2] / dev[1];
    c.m["decay_ratio_40_80"] = dev[3] / dev[2];
    const FrontSet fin = front_set_at(sol, T);
    auto plateaus = spacing_plateaus(pieces(fin, T));
    c.m["spacing_plateaus"] = static_cast<double>(plateaus.size());
    for (std::size_t k = 0; k < plateaus.size(); ++k) c.metrics["plateau_" + std::to_string(k)] = plateaus[k];
    std::vector<double> xs;
    for (int i = 0; i <= 100; ++i) xs.push_back(-0.995 + 0.0099 * i);
    auto inside = sample(fin, T, xs);
    double lo = inside.front().u, hi = lo;
    for (const auto& s : inside) {
        lo = std::min(lo, s.u);
        hi = std::max(hi, s.u);
    }
    c.m["slow_cars_widening"] = lo - ub;
    c.m["slow_cars_spread"] = hi - lo;
    c.metrics["final_sup_dev"] = max_v_dev(c.fam, fin, vbar);
}

void run_underspeed(Ctx& c)
{
    const double T = c.p["t_end"], ub = c.p["u_bar"], v1 = c.p["v1"];
    const HState s1 = state_on_decel(c.fam, ub);
    const double u1 = inv_vD(c.fam, v1);
    const HState s2 = state_on_decel(c.fam, u1);
    const auto o = track_opts(c.p);
    auto sol = track(c, "tracking", {{-1.0, 0.0}, {s1, s2, s1}}, Topology::open(), T, o);
    auto is_slow = [&](const HState& s) { return velocity(c.fam, s) <= v1 + kVelTol; };

    // Least-squares line through the zone width over [1, T].
    std::vector<double> ts, ws;
    for (int i = 0; i < 10; ++i) {
        double t = 1.0 + (T - 1.0) * i / 9.0;
        ts.push_back(t);
        ws.push_back(zone_width(front_set_at(sol, t), t, is_slow));
    }
    const double n = static_cast<double>(ts.size());
    const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
    const double mw = std::accumulate(ws.begin(), ws.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mt) * (ws[i] - mw);
        sxx += (ts[i] - mt) * (ts[i] - mt);
        syy += (ws[i] - mw) * (ws[i] - mw);
    }
    const double slope = sxy / sxx;
    c.m["growth_r2"] = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
    c.metrics["growth_rate"] = slope;

    const double s_shock = -(v1 - velocity(c.fam, s1)) / (u1 - ub);
    const RiemannFan right = solve_riemann(c.fam, s2, s1);
    const double s_lead = right.waves.empty() ? 0.0 : right.waves.front().left_edge();
    const double predicted = s_lead - s_shock;
    c.metrics["predicted_rate"] = predicted;
    c.m["growth_rate_rel_error"] = std::abs(slope - predicted) / std::abs(predicted);

    const ScalarLaw law = scalar_law_decel(c.fam);
    const double dv = c.p["delta_v"];
    const double horizon = 10.0 * T;
    auto ssol = scalar_evolve(law, scalar_init(law, {-1.0, 0.0}, {ub, u1, ub}, dv), horizon, kMaxEvents, dv);
    auto scalar_zone = [&](const ScalarSet& s) {
        double w = 0.0;
        for (std::size_t k = 1; k + 1 < s.u.size(); ++k)
            if (law.v(s.u[k]) <= v1 + kVelTol) w += s.fronts[k].at(s.t) - s.fronts[k - 1].at(s.t);
        return w;
    };
    c.m["lwr_slow_zone_final"] = scalar_zone(ssol.final_set);
    double t_elim = -1.0;
    for (const auto& s : ssol.after_events)
        if (scalar_zone(s) <= 0.0) {
            t_elim = s.t;
            break;
        }
    c.metrics["lwr_elimination_time"] = t_elim;
}

void run_over_braking(Ctx& c)
{
    const double T = c.p["t_end"], ub = c.p["u_bar"], v1 = c.p["v1"];
    const double vbar = band_velocity(c.fam, ub, kMidBand);
    const HState s1 = state_at(c.fam, ub, vbar), s2 = state_at(c.fam, ub, v1);
    const Datum d{{-1.0, 0.0}, {s1, s2, s1}};
    TrackOptions ob = track_opts(c.p);
    ob.policy = [](const CurveFamily& fam, const HState& l, const HState& r,
                   const EventContext& ctx) -> std::optional<RiemannFan> {
        if (ctx.initial && ctx.index == 0) return solve_riemann_overbraking(fam, l, r, kOverbrakeV2);
        return std::nullopt;
    };
    auto sol_ob = track(c, "overbraking", d, Topology::open(), T, ob);
    auto sol_r = track(c, "rational", d, Topology::open(), T, track_opts(c.p));
    auto jam = [&](const HState& s) { return velocity(c.fam, s) <= kOverbrakeV2 + kVelTol; };
    auto slow = [&](const HState& s) { return velocity(c.fam, s) <= v1 + kVelTol; };
    const double w_end = zone_width(sol_ob.final_set, T, jam);
    c.m["ob_zone_final"] = w_end;
    c.m["ob_zone_growth"] = w_end - zone_width(front_set_at(sol_ob, 0.5 * T), 0.5 * T, jam);
    c.m["rational_zone_final"] = zone_width(sol_r.final_set, T, slow);
    c.metrics["rational_elimination_time"] =
        first_time(sol_r, [&](const FrontSet& fs) { return zone_width(fs, fs.t, slow) <= 0.0; });
    c.metrics["v2"] = kOverbrakeV2;
}

} // namespace

bool ScenarioReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.pass; });
}

std::vector<ScenarioInfo> list_scenarios()
{
    static const std::vector<ScenarioInfo> cat = build_catalog();
    return cat;
}

const ScenarioInfo& scenario_info(const std::string& name)
{
    static const std::vector<ScenarioInfo> cat = build_catalog();
    for (const auto& s : cat)
        if (s.name == name) return s;
    throw ConfigError("unknown scenario '" + name + "'");
}

bool evaluate(const CheckSpec& spec, double m)
{
    if (std::isnan(m)) return false;
    if (spec.relation == "<") return m < spec.expected;
    if (spec.relation == "<=") return m <= spec.expected;
    if (spec.relation == ">") return m > spec.expected;
    if (spec.relation == ">=") return m >= spec.expected;
    if (spec.relation == "==") return std::abs(m - spec.expected) <= spec.tolerance;
    throw ConfigError("check '" + spec.name + "': unknown relation '" + spec.relation + "'");
}

namespace {

ScenarioResult run_with(const std::string& name, const std::map<std::string, double>& overrides, const CurveFamily& fam,
                        const std::vector<CheckSpec>& specs)
{
    const ScenarioInfo& info = scenario_info(name);
    Ctx c{fam, resolve(info, overrides), {}, {}, {}};
    c.res.snapshot_times = quarter_times(c.p["t_end"]);
    if (name == "car_train") run_car_train(c);
    else if (name == "stop_and_go") run_stop_and_go(c);
    else if (name == "temp_bottleneck") run_temp_bottleneck(c);
    else if (name == "ring_road") run_ring_road(c);
    else if (name == "free_zone_disturbance") run_free_zone(c);
    else if (name == "decay_sparse_upstream") run_decay(c, true);
    else if (name == "faster_downstream") run_decay(c, false);
    else if (name == "small_perturbation") run_small_perturbation(c);
    else if (name == "underspeed_on_vD") run_underspeed(c);
    else if (name == "over_braking") run_over_braking(c);

    ScenarioReport& rep = c.res.report;
    rep.name = info.name;
    rep.engine = info.engine;
    rep.family = fam.name;
    rep.params = c.p;
    rep.metrics = c.metrics;
    for (const auto& spec : specs) {
        auto it = c.m.find(spec.name);
        if (it == c.m.end()) throw ConfigError(name + ": no measurement named '" + spec.name + "'");
        rep.checks.push_back({spec.name, evaluate(spec, it->second), it->second, spec.expected, spec.tolerance,
                              spec.relation});
    }
    return std::move(c.res);
}

} // namespace

ScenarioResult run_scenario(const std::string& name, const std::map<std::string, double>& overrides,
                            const CurveFamily& fam)
{
    return run_with(name, overrides, fam, scenario_info(name).checks);
}

ScenarioFile default_scenario_file(const std::string& name)
{
    const ScenarioInfo& info = scenario_info(name);
    ScenarioFile f;
    f.name = info.name;
    f.engine = info.engine;
    f.family = nlohmann::json{{"builtin", "default-concave-v1"}};
    for (const auto& p : info.params) f.params[p.name] = p.value;
    f.checks = info.checks;
    return f;
}

ScenarioResult run_scenario_file(const ScenarioFile& file)
{
    const ScenarioInfo& info = scenario_info(file.name);
    if (!file.engine.empty() && file.engine != info.engine)
        throw ConfigError(file.name + ": engine '" + file.engine + "' does not match '" + info.engine + "'");
    const CurveFamily fam = family_from_json(file.family);
    return run_with(file.name, file.params, fam, file.checks.empty() ? info.checks : file.checks);
}

std::vector<Piece> pieces(const FrontSet& fs, double t, double margin)
{
    std::vector<Piece> out;
    const auto pos = fs.positions(t);
    if (fs.topo.ring) {
        const double L = fs.topo.period;
        if (pos.empty()) return {{-0.5 * L, 0.5 * L, fs.states.front()}};
        for (std::size_t k = 1; k < pos.size(); ++k) out.push_back({pos[k - 1], pos[k], fs.states[k]});
        out.push_back({pos.back(), pos.front() + L, fs.states.back()});
        return out;
    }
    if (pos.empty()) return {{-margin, margin, fs.states.front()}};
    out.push_back({pos.front() - margin, pos.front(), fs.states.front()});
    for (std::size_t k = 1; k < pos.size(); ++k) out.push_back({pos[k - 1], pos[k], fs.states[k]});
    out.push_back({pos.back(), pos.back() + margin, fs.states.back()});
    return out;
}

double zone_width(const FrontSet& fs, double t, const std::function<bool(const HState&)>& pred)
{
    auto ps = pieces(fs, t);
    std::size_t lo = 0, hi = ps.size();
    if (!fs.topo.ring) {
        if (ps.size() < 3) return 0.0;
        lo = 1;
        hi = ps.size() - 1;
    }
    double w = 0.0;
    for (std::size_t k = lo; k < hi; ++k)
        if (pred(ps[k].state)) w += ps[k].b - ps[k].a;
    return w;
}

std::vector<double> spacing_plateaus(const std::vector<Piece>& ps, double min_len, double rel_tol)
{
    if (ps.empty()) return {};
    double umin = ps.front().state.u, umax = umin;
    for (const auto& p : ps) {
        umin = std::min(umin, p.state.u);
        umax = std::max(umax, p.state.u);
    }
    const double tol = rel_tol * (umax - umin);
    std::vector<double> values;
    std::size_t i = 0;
    while (i < ps.size()) {
        double lo = ps[i].state.u, hi = lo, len = 0.0, mass = 0.0;
        std::size_t j = i;
        while (j < ps.size()) {
            double nlo = std::min(lo, ps[j].state.u), nhi = std::max(hi, ps[j].state.u);
            if (nhi - nlo > tol) break;
            lo = nlo;
            hi = nhi;
            len += ps[j].b - ps[j].a;
            mass += (ps[j].b - ps[j].a) * ps[j].state.u;
            ++j;
        }
        if (len >= min_len) values.push_back(mass / len);
        i = j;
    }
    std::sort(values.begin(), values.end());
    std::vector<double> merged;
    for (double v : values)
        if (merged.empty() || v - merged.back() > tol) merged.push_back(v);
    return merged;
}

std::vector<double> velocity_levels(const CurveFamily& fam, const FrontSet& fs, double tol)
{
    std::vector<double> v;
    for (const auto& s : fs.states) v.push_back(velocity(fam, s));
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

void replay(const TrackedSolution& sol, const std::function<void(const FrontSet&, const Event&)>& visit)
{
    FrontSet fs = sol.initial;
    for (const Event& ev : sol.events) {
        apply_event(fs, ev);
        fs.t = ev.t;
        visit(fs, ev);
    }
}

double l1_distance(const CurveFamily& fam, const GridState& g, const FrontSet& fs)
{
    if (fs.topo.ring) throw ConfigError("l1_distance: open lane only");
    const auto pos = fs.positions(fs.t);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = g.x_lo + static_cast<double>(i) * g.dx, b = a + g.dx;
        auto k = static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), a) - pos.begin());
        double x = a, su = 0.0, sv = 0.0;
        while (x < b) {
            const double nx = k < pos.size() ? std::min(pos[k], b) : b;
            su += (nx - x) * fs.states[k].u;
            sv += (nx - x) * velocity(fam, fs.states[k]);
            x = nx;
            ++k;
        }
        err += std::abs(g.u[i] - su / g.dx) + std::abs(velocity(fam, g.state(i)) - sv / g.dx);
    }
    return err * g.dx;
}

} // namespace hlwr
