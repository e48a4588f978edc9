#pragma once

#include <vector>

#include "hlwr/curve_model.hpp"
#include "hlwr/front_tracking.hpp"

namespace hlwr {

/// Cell i covers [x_lo + i dx, x_lo + (i+1) dx). On an open lane the right
/// ghost is the fixed lead-car state.
struct GridState {
    double dx = 1.0;
    double x_lo = 0.0;
    std::vector<double> u;
    std::vector<double> h;
    bool ring = false;
    HState right_ghost;
    double t = 0.0;

    std::size_t size() const { return u.size(); }
    double center(std::size_t i) const { return x_lo + (static_cast<double>(i) + 0.5) * dx; }
    HState state(std::size_t i) const { return {u[i], h[i]}; }
};

/// Cells sampled from the datum at their centres. A ring needs x_hi - x_lo = L.
GridState make_grid(const CurveFamily& fam, const Datum& data, double x_lo, double x_hi, double dx, bool ring);

/// cfl * dx over the largest characteristic slope, counting the slope a cell
/// reaches while braking toward a slower right neighbour.
double cfl_dt(const CurveFamily& fam, const GridState& g, double cfl = 0.9);

/// Hysteresis projection after a spacing update.
double update_hysteresis(const CurveFamily& fam, double u_old, double h_old, double u_new);

/// One upwind step; `clamp` receives the largest band clamp applied.
GridState step(const CurveFamily& fam, const GridState& g, double dt, double* clamp = nullptr);

std::vector<double> velocities(const CurveFamily& fam, const GridState& g);
double total_variation_v(const CurveFamily& fam, const GridState& g);
double sup_deviation_v(const CurveFamily& fam, const GridState& g, double v_ref);

struct FvObservers {
    std::vector<double> snapshot_times;
    double v_ref = 0.0;
    double series_dt = 0.0; ///< 0 records every step
};

struct SeriesPoint {
    double t = 0.0;
    double tv_v = 0.0;
    double sup_dev = 0.0;
};

struct FvRun {
    GridState final_grid;
    std::vector<GridState> snapshots;
    std::vector<SeriesPoint> series;
    double max_clamp = 0.0;
    long steps = 0;
};

FvRun run(const CurveFamily& fam, const GridState& g0, double t_end, double cfl = 0.9, const FvObservers& obs = {});

} // namespace hlwr
