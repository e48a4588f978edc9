#include "hlwr/scalar_lwr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hlwr/errors.hpp"
#include "hlwr/numerics.hpp"

namespace hlwr {

namespace {

std::vector<ScalarFront> fan(const ScalarLaw& law, double ul, double ur, double x, double t, double delta_v,
                             std::vector<double>& inner)
{
    std::vector<ScalarFront> out;
    inner.clear();
    if (ul == ur) return out;
    const double vl = law.v(ul), vr = law.v(ur);
    auto rh = [&](double a, double b) { return -(law.v(b) - law.v(a)) / (b - a); };
    if (ul > ur) {
        out.push_back({x, t, rh(ul, ur)});
        return out;
    }
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(vr - vl) / delta_v)));
    double prev = ul;
    for (std::size_t k = 1; k <= m; ++k) {
        double next = k == m ? ur : law.inverse(vl + (vr - vl) * static_cast<double>(k) / static_cast<double>(m));
        double s = rh(prev, next);
        if (!out.empty()) s = std::max(s, out.back().speed);
        out.push_back({x, t, s});
        if (k < m) inner.push_back(next);
        prev = next;
    }
    return out;
}

void splice(const ScalarLaw& law, ScalarSet& s, std::size_t first, std::size_t count, double x, double t,
            double delta_v)
{
    std::vector<double> inner;
    auto fronts = fan(law, s.u[first], s.u[first + count], x, t, delta_v, inner);
    s.fronts.erase(s.fronts.begin() + static_cast<std::ptrdiff_t>(first),
                   s.fronts.begin() + static_cast<std::ptrdiff_t>(first + count));
    s.u.erase(s.u.begin() + static_cast<std::ptrdiff_t>(first + 1),
              s.u.begin() + static_cast<std::ptrdiff_t>(first + count));
    s.fronts.insert(s.fronts.begin() + static_cast<std::ptrdiff_t>(first), fronts.begin(), fronts.end());
    if (fronts.empty()) {
        s.u.erase(s.u.begin() + static_cast<std::ptrdiff_t>(first + 1));
        return;
    }
    s.u.insert(s.u.begin() + static_cast<std::ptrdiff_t>(first + 1), inner.begin(), inner.end());
}

} // namespace

double ScalarLaw::inverse(double vel) const { return invert_increasing(v, vel, u_lo, u_hi); }

ScalarLaw scalar_law_decel(const CurveFamily& fam)
{
    ScalarLaw law;
    law.v = fam.vD;
    law.u_lo = 1.0;
    law.u_hi = 1e9;
    return law;
}

ScalarLaw scalar_law_scanning(const CurveFamily& fam, double h)
{
    ScalarLaw law;
    auto vs = fam.vS;
    law.v = [vs, h](double u) { return vs(u, h); };
    law.u_lo = fam.uD(h);
    law.u_hi = fam.uA(h);
    return law;
}

double ScalarSet::sample(double at_t, double x) const
{
    std::size_t k = 0;
    while (k < fronts.size() && fronts[k].at(at_t) <= x) ++k;
    return u[k];
}

ScalarSet scalar_init(const ScalarLaw& law, const std::vector<double>& jumps, const std::vector<double>& u,
                      double delta_v)
{
    if (u.size() != jumps.size() + 1) throw ConfigError("scalar_init: need one more state than jumps");
    if (!(delta_v > 0.0)) throw ConfigError("scalar_init: delta_v must be positive");
    if (!std::is_sorted(jumps.begin(), jumps.end())) throw ConfigError("scalar_init: jumps must be sorted");
    for (double ui : u)
        if (ui < law.u_lo || ui > law.u_hi) throw DomainError("scalar_init: state outside the law's range");
    ScalarSet s;
    s.u.push_back(u.front());
    for (std::size_t k = 0; k < jumps.size(); ++k) {
        std::vector<double> inner;
        auto fronts = fan(law, u[k], u[k + 1], jumps[k], 0.0, delta_v, inner);
        s.fronts.insert(s.fronts.end(), fronts.begin(), fronts.end());
        s.u.insert(s.u.end(), inner.begin(), inner.end());
        if (u[k] != u[k + 1]) s.u.push_back(u[k + 1]);
    }
    return s;
}

ScalarSolution scalar_evolve(const ScalarLaw& law, const ScalarSet& s0, double t_end, std::size_t max_events,
                             double delta_v)
{
    ScalarSolution sol;
    sol.initial = s0;
    ScalarSet s = s0;
    while (true) {
        std::optional<std::pair<double, std::size_t>> best;
        for (std::size_t i = 0; i + 1 < s.fronts.size(); ++i) {
            const auto& a = s.fronts[i];
            const auto& b = s.fronts[i + 1];
            if (!(a.speed > b.speed)) continue;
            double gap = b.at(s.t) - a.at(s.t);
            double tm = s.t + std::max(0.0, gap) / (a.speed - b.speed);
            if (!best || tm < best->first) best = {tm, i};
        }
        if (!best || best->first > t_end) break;
        if (sol.after_events.size() >= max_events) {
            sol.budget_exceeded = true;
            break;
        }
        const double tm = best->first;
        std::size_t first = best->second;
        const double x = s.fronts[first].at(tm);
        std::size_t last = first + 1;
        while (last + 1 < s.fronts.size() && std::abs(s.fronts[last + 1].at(tm) - x) <= 1e-12 * std::max(1.0, std::abs(x)))
            ++last;
        s.t = tm;
        splice(law, s, first, last - first + 1, x, tm, delta_v);
        sol.after_events.push_back(s);
    }
    s.t = std::max(s.t, t_end);
    sol.final_set = s;
    return sol;
}

} // namespace hlwr
