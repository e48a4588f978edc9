#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hlwr/curve_model.hpp"
#include "hlwr/riemann.hpp"
#include "hlwr/wave_theory.hpp"

namespace hlwr {

struct Topology {
    bool ring = false;
    double period = 0.0; ///< ring length L; positions live in [-L/2, L/2)

    static Topology open() { return {}; }
    static Topology make_ring(double L) { return {true, L}; }
    friend bool operator==(const Topology&, const Topology&) = default;
};

/// A front moves linearly: x(t) = x0 + speed * (t - t0).
struct Front {
    double x0 = 0.0;
    double t0 = 0.0;
    double speed = 0.0;
    WaveKind kind = WaveKind::ST;

    double at(double t) const { return x0 + speed * (t - t0); }
    friend bool operator==(const Front&, const Front&) = default;
};

/// states[k] sits left of fronts[k]; states.size() == fronts.size() + 1.
/// On a ring states.front() == states.back() and the last front is followed by
/// the first one shifted by L. Ring positions are stored unwrapped.
struct FrontSet {
    std::vector<Front> fronts;
    std::vector<HState> states;
    double t = 0.0;
    Topology topo;

    std::vector<double> positions(double at_t) const;
    std::vector<double> positions() const { return positions(t); }
    friend bool operator==(const FrontSet&, const FrontSet&) = default;
};

/// Piecewise-constant datum: states[0] left of jumps[0], states[k] on [jumps[k-1], jumps[k]).
struct Datum {
    std::vector<double> jumps;
    std::vector<HState> states;
    friend bool operator==(const Datum&, const Datum&) = default;
};

struct EventContext {
    bool initial = false;
    std::size_t index = 0; ///< jump index at t = 0, event count afterwards
    double t = 0.0;
    double x = 0.0;
};

/// Returns a fan to use instead of solve_riemann, or nothing to keep the default.
using RiemannPolicy =
    std::function<std::optional<RiemannFan>(const CurveFamily&, const HState&, const HState&, const EventContext&)>;

struct TrackOptions {
    double delta_v = 1e-3; ///< rarefaction jump strength in velocity
    RiemannPolicy policy;
};

/// Fronts [first, first + in.size()) and the states around them are replaced
/// by `out` / `out_states`, after rotating the ring left by `rotate` fronts.
struct Event {
    double t = 0.0;
    double x = 0.0;
    std::size_t rotate = 0;
    std::size_t first = 0;
    std::vector<Front> in;
    std::vector<HState> in_states;
    std::vector<Front> out;
    std::vector<HState> out_states;
    std::string case_tag;
    friend bool operator==(const Event&, const Event&) = default;
};

struct TrackedSolution {
    FrontSet initial;
    FrontSet final_set;
    std::vector<Event> events;
    std::vector<FrontSet> snapshots;
    bool budget_exceeded = false;
    std::size_t max_fronts = 0;
};

FrontSet init_fronts(const CurveFamily& fam, const Datum& data, const Topology& topo, const TrackOptions& opts = {});

/// Fronts of one fan, all starting at (x, t); rarefactions become staircases.
/// Returns the fronts and the states between them (fronts.size() + 1 entries).
std::pair<std::vector<Front>, std::vector<HState>> discretize_fan(const CurveFamily& fam, const RiemannFan& fan,
                                                                  double x, double t, double delta_v);

struct Interaction {
    double t = 0.0;
    std::size_t index = 0; ///< left front of the earliest meeting pair
};

std::optional<Interaction> next_interaction(const FrontSet& fs);

TrackedSolution evolve(const CurveFamily& fam, const FrontSet& fs, double t_end, std::size_t max_events,
                       const TrackOptions& opts = {}, const std::vector<double>& snapshot_times = {});

/// Moves the first `count` ring fronts to the end, shifted by L.
void rotate_ring(FrontSet& fs, std::size_t count);

/// Applies one logged event to a set already advanced to the event time.
void apply_event(FrontSet& fs, const Event& ev);

/// The front set in force at time t (events replayed up to t).
FrontSet front_set_at(const TrackedSolution& sol, double t);

std::vector<HState> sample(const FrontSet& fs, double t, const std::vector<double>& xs);
std::vector<HState> sample(const TrackedSolution& sol, double t, const std::vector<double>& xs);

/// Wrap into [-L/2, L/2).
double wrap_position(double x, double L);

/// Wave record of front k (kind, neighbouring states, speed).
Wave front_wave(const FrontSet& fs, std::size_t k);

} // namespace hlwr
