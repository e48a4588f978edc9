#pragma once

#include <cstddef>
#include <vector>

#include "hlwr/curve_model.hpp"

namespace hlwr {

/// Single-valued law u_t - V(u)_x = 0 with V increasing and concave on [u_lo, u_hi].
struct ScalarLaw {
    Fn1 v;
    double u_lo = 1.0;
    double u_hi = 1.0;

    double inverse(double vel) const;
};

/// Classical LWR on the deceleration curve.
ScalarLaw scalar_law_decel(const CurveFamily& fam);
/// The scanning curve through h, restricted to the band.
ScalarLaw scalar_law_scanning(const CurveFamily& fam, double h);

struct ScalarFront {
    double x0 = 0.0;
    double t0 = 0.0;
    double speed = 0.0;

    double at(double t) const { return x0 + speed * (t - t0); }
};

/// u[k] sits left of fronts[k].
struct ScalarSet {
    std::vector<ScalarFront> fronts;
    std::vector<double> u;
    double t = 0.0;

    double sample(double at_t, double x) const;
};

struct ScalarSolution {
    ScalarSet initial;
    std::vector<ScalarSet> after_events; ///< one entry per interaction, in time order
    ScalarSet final_set;
    bool budget_exceeded = false;
};

/// Jumps at `jumps`, u[k] on the k-th piece; rarefactions split into steps of at most delta_v in V.
ScalarSet scalar_init(const ScalarLaw& law, const std::vector<double>& jumps, const std::vector<double>& u,
                      double delta_v);

ScalarSolution scalar_evolve(const ScalarLaw& law, const ScalarSet& s0, double t_end, std::size_t max_events,
                             double delta_v);

} // namespace hlwr
