#include "hlwr/front_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "hlwr/errors.hpp"

namespace hlwr {

namespace {

constexpr double kClusterTol = 1e-12;

bool same_state(const HState& a, const HState& b)
{
    return std::abs(a.u - b.u) < kZeroStrength && std::abs(a.h - b.h) < kZeroStrength;
}

RiemannFan choose_fan(const CurveFamily& fam, const HState& l, const HState& r, const EventContext& ctx,
                      const TrackOptions& opts)
{
    if (opts.policy) {
        if (auto fan = opts.policy(fam, l, r, ctx)) return *fan;
    }
    return solve_riemann(fam, l, r);
}

std::string where(const EventContext& ctx)
{
    if (ctx.initial) return "jump " + std::to_string(ctx.index);
    return "event " + std::to_string(ctx.index) + " at t=" + std::to_string(ctx.t);
}

// meeting time of fronts a (left) and b (right), `shift` added to b's position
double meeting_time(const Front& a, const Front& b, double t, double shift)
{
    double ds = a.speed - b.speed;
    if (!(ds > 0.0)) return std::numeric_limits<double>::infinity();
    double gap = b.at(t) + shift - a.at(t);
    return t + std::max(gap, 0.0) / ds;
}

std::vector<double> pair_times(const FrontSet& fs)
{
    const std::size_t n = fs.fronts.size();
    std::vector<double> tm;
    if (n == 0) return tm;
    for (std::size_t k = 0; k + 1 < n; ++k) tm.push_back(meeting_time(fs.fronts[k], fs.fronts[k + 1], fs.t, 0.0));
    if (fs.topo.ring) tm.push_back(meeting_time(fs.fronts[n - 1], fs.fronts[0], fs.t, fs.topo.period));
    return tm;
}

} // namespace

std::vector<double> FrontSet::positions(double at_t) const
{
    std::vector<double> xs;
    xs.reserve(fronts.size());
    for (const auto& f : fronts) xs.push_back(f.at(at_t));
    return xs;
}

double wrap_position(double x, double L)
{
    double y = x - L * std::floor((x + 0.5 * L) / L);
    if (y >= 0.5 * L) y -= L;
    return y;
}

Wave front_wave(const FrontSet& fs, std::size_t k)
{
    const Front& f = fs.fronts.at(k);
    Wave w;
    w.kind = f.kind;
    w.left = fs.states[k];
    w.right = fs.states[k + 1];
    w.speed = f.speed;
    w.fan = {f.speed, f.speed};
    return w;
}

std::pair<std::vector<Front>, std::vector<HState>> discretize_fan(const CurveFamily& fam, const RiemannFan& fan,
                                                                  double x, double t, double delta_v)
{
    if (!(delta_v > 0.0)) throw ConfigError("delta_v must be positive");
    std::vector<Front> fronts;
    std::vector<HState> states{fan.left};
    for (const Wave& w : fan.waves) {
        if (!is_rarefaction(w.kind)) {
            fronts.push_back({x, t, w.kind == WaveKind::ST ? 0.0 : w.speed, w.kind});
            states.push_back(w.right);
            continue;
        }
        const double vl = velocity(fam, w.left), vr = velocity(fam, w.right);
        const int m = std::max(1, static_cast<int>(std::ceil(std::abs(vr - vl) / delta_v - 1e-9)));
        for (int k = 1; k <= m; ++k) {
            HState next = w.right;
            if (k < m) {
                double v = vl + (vr - vl) * k / m;
                next = w.kind == WaveKind::ScR ? state_on_scanning(fam, w.left.h, v) : state_on_accel(fam, inv_vA(fam, v));
            }
            fronts.push_back({x, t, shock_speed(fam, states.back(), next), w.kind});
            states.push_back(next);
        }
    }
    for (std::size_t k = 1; k < fronts.size(); ++k) fronts[k].speed = std::max(fronts[k].speed, fronts[k - 1].speed);
    states.back() = fan.right;
    return {fronts, states};
}

FrontSet init_fronts(const CurveFamily& fam, const Datum& data, const Topology& topo, const TrackOptions& opts)
{
    if (data.states.empty()) throw ConfigError("init_fronts: empty datum");
    if (data.states.size() != data.jumps.size() + 1) throw ConfigError("init_fronts: need one more state than jumps");
    for (std::size_t k = 1; k < data.jumps.size(); ++k)
        if (!(data.jumps[k] > data.jumps[k - 1])) throw ConfigError("init_fronts: jumps must increase strictly");
    for (std::size_t k = 0; k < data.states.size(); ++k)
        if (!in_band(fam, data.states[k]))
            throw DomainError("init_fronts: state " + std::to_string(k) + " is out of band");

    Datum d = data;
    if (topo.ring) {
        if (!(topo.period > 2.0)) throw ConfigError("init_fronts: ring period must exceed 2");
        const double half = 0.5 * topo.period;
        for (double x : d.jumps)
            if (x < -half || x >= half) throw ConfigError("init_fronts: ring jumps must lie in [-L/2, L/2)");
        if (!d.jumps.empty() && d.jumps.front() == -half) {
            d.jumps.erase(d.jumps.begin());
            d.states.erase(d.states.begin());
        }
        if (!same_state(d.states.front(), d.states.back())) {
            d.jumps.insert(d.jumps.begin(), -half);
            d.states.insert(d.states.begin(), d.states.back());
        }
    }

    FrontSet fs;
    fs.topo = topo;
    fs.states.push_back(d.states.front());
    for (std::size_t k = 0; k < d.jumps.size(); ++k) {
        const HState l = fs.states.back(), r = d.states[k + 1];
        if (same_state(l, r)) continue;
        EventContext ctx{true, k, 0.0, d.jumps[k]};
        try {
            RiemannFan fan = choose_fan(fam, l, r, ctx, opts);
            auto [fronts, states] = discretize_fan(fam, fan, d.jumps[k], 0.0, opts.delta_v);
            fs.fronts.insert(fs.fronts.end(), fronts.begin(), fronts.end());
            fs.states.insert(fs.states.end(), states.begin() + 1, states.end());
        } catch (const NoSolution& e) {
            throw NoSolution(where(ctx) + ": " + e.what());
        }
    }
    if (topo.ring) fs.states.back() = fs.states.front();
    return fs;
}

std::optional<Interaction> next_interaction(const FrontSet& fs)
{
    auto tm = pair_times(fs);
    std::optional<Interaction> best;
    for (std::size_t k = 0; k < tm.size(); ++k) {
        if (!std::isfinite(tm[k])) continue;
        if (!best || tm[k] < best->t) best = Interaction{tm[k], k};
    }
    return best;
}

void rotate_ring(FrontSet& fs, std::size_t count)
{
    if (count == 0) return;
    for (std::size_t r = 0; r < count; ++r) fs.fronts[r].x0 += fs.topo.period;
    std::rotate(fs.fronts.begin(), fs.fronts.begin() + static_cast<std::ptrdiff_t>(count), fs.fronts.end());
    fs.states.pop_back();
    std::rotate(fs.states.begin(), fs.states.begin() + static_cast<std::ptrdiff_t>(count), fs.states.end());
    fs.states.push_back(fs.states.front());
}

void apply_event(FrontSet& fs, const Event& ev)
{
    rotate_ring(fs, ev.rotate);
    const auto a = static_cast<std::ptrdiff_t>(ev.first);
    const auto nin = static_cast<std::ptrdiff_t>(ev.in.size());
    fs.fronts.erase(fs.fronts.begin() + a, fs.fronts.begin() + a + nin);
    fs.fronts.insert(fs.fronts.begin() + a, ev.out.begin(), ev.out.end());
    fs.states.erase(fs.states.begin() + a, fs.states.begin() + a + nin + 1);
    fs.states.insert(fs.states.begin() + a, ev.out_states.begin(), ev.out_states.end());
    fs.t = ev.t;
}

TrackedSolution evolve(const CurveFamily& fam, const FrontSet& start, double t_end, std::size_t max_events,
                       const TrackOptions& opts, const std::vector<double>& snapshot_times)
{
    TrackedSolution sol;
    sol.initial = start;
    FrontSet fs = start;
    sol.max_fronts = fs.fronts.size();

    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    auto take_snapshots = [&](double before) {
        while (next_snap < snaps.size() && snaps[next_snap] < before && snaps[next_snap] <= t_end) {
            FrontSet s = fs;
            s.t = snaps[next_snap++];
            sol.snapshots.push_back(std::move(s));
        }
    };

    for (;;) {
        auto tm = pair_times(fs);
        double tmin = std::numeric_limits<double>::infinity();
        for (double v : tm) tmin = std::min(tmin, v);
        if (!(tmin <= t_end)) break;
        if (sol.events.size() >= max_events) {
            sol.budget_exceeded = true;
            break;
        }
        take_snapshots(tmin);

        const std::size_t n = fs.fronts.size(), np = tm.size();
        std::vector<bool> meet(np);
        for (std::size_t k = 0; k < np; ++k) meet[k] = tm[k] <= tmin + kClusterTol;

        // leftmost run of meeting pairs; on a ring a run may cross the seam
        std::size_t start_pair = np, len = 0;
        bool whole_ring = false;
        if (fs.topo.ring && std::all_of(meet.begin(), meet.end(), [](bool b) { return b; })) {
            whole_ring = true;
        } else {
            for (std::size_t k = 0; k < np; ++k) {
                bool prev = fs.topo.ring ? meet[(k + np - 1) % np] : (k > 0 && meet[k - 1]);
                if (meet[k] && !prev) {
                    start_pair = k;
                    break;
                }
            }
            while (len < np && meet[(start_pair + len) % np]) ++len;
        }

        Event ev;
        ev.t = std::max(tmin, fs.t);
        std::size_t a = 0, b = n - 1;
        if (!whole_ring) {
            a = start_pair;
            b = a + len;
            if (b >= n) {
                ev.rotate = b - (n - 1);
                a -= ev.rotate;
                b = n - 1;
            }
        }
        FrontSet work = fs;
        rotate_ring(work, ev.rotate);
        ev.first = a;
        double xsum = 0.0;
        for (std::size_t k = a; k <= b; ++k) {
            ev.in.push_back(work.fronts[k]);
            xsum += work.fronts[k].at(ev.t);
        }
        ev.x = xsum / static_cast<double>(b - a + 1);
        ev.in_states.assign(work.states.begin() + static_cast<std::ptrdiff_t>(a),
                            work.states.begin() + static_cast<std::ptrdiff_t>(b) + 2);

        const HState l = ev.in_states.front(), r = ev.in_states.back();
        EventContext ctx{false, sol.events.size(), ev.t, ev.x};
        if (same_state(l, r)) {
            ev.out_states = {l};
            ev.case_tag = "const";
        } else {
            try {
                RiemannFan fan = choose_fan(fam, l, r, ctx, opts);
                ev.case_tag = fan.case_tag;
                std::tie(ev.out, ev.out_states) = discretize_fan(fam, fan, ev.x, ev.t, opts.delta_v);
            } catch (const NoSolution& e) {
                throw NoSolution(where(ctx) + ": " + e.what());
            }
        }
        apply_event(fs, ev);
        sol.events.push_back(std::move(ev));
        sol.max_fronts = std::max(sol.max_fronts, fs.fronts.size());
    }

    take_snapshots(std::numeric_limits<double>::infinity());
    sol.final_set = fs;
    if (!sol.budget_exceeded) sol.final_set.t = t_end;
    return sol;
}

FrontSet front_set_at(const TrackedSolution& sol, double t)
{
    FrontSet fs = sol.initial;
    for (const Event& ev : sol.events) {
        if (ev.t > t) break;
        apply_event(fs, ev);
    }
    fs.t = t;
    return fs;
}

std::vector<HState> sample(const FrontSet& fs, double t, const std::vector<double>& xs)
{
    const auto pos = fs.positions(t);
    std::vector<HState> out;
    out.reserve(xs.size());
    for (double x : xs) {
        if (pos.empty()) {
            out.push_back(fs.states.front());
            continue;
        }
        double q = x;
        if (fs.topo.ring) {
            const double L = fs.topo.period;
            q = pos.front() + (x - pos.front() - L * std::floor((x - pos.front()) / L));
        }
        auto k = static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), q) - pos.begin());
        out.push_back(fs.states[k]);
    }
    return out;
}

std::vector<HState> sample(const TrackedSolution& sol, double t, const std::vector<double>& xs)
{
    return sample(front_set_at(sol, t), t, xs);
}

} // namespace hlwr
