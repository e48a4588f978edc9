#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hlwr/curve_model.hpp"

// Deliberately broken copies of the default family, each aimed at one inequality.
struct Mutation {
    std::string label;
    std::string intended_check;
    hlwr::CurveFamily fam;
};

inline std::vector<Mutation> mutation_suite()
{
    using hlwr::CurveFamily;
    std::vector<Mutation> out;
    const CurveFamily base = hlwr::make_default_family();

    {
        CurveFamily f = base;
        f.vD = [](double u) { return 1.0 - 1.0 / u - 0.05 * (u - 4.0) * (u - 4.0); };
        f.dvD = [](double u) { return 1.0 / (u * u) - 0.1 * (u - 4.0); };
        out.push_back({"vD turns down", "monotonicity", f});
    }
    {
        CurveFamily f = base;
        f.vD = [](double u) { return 1.0 - 1.0 / u + (u > 5.0 ? 0.02 * (u - 5.0) * (u - 5.0) : 0.0); };
        f.dvD = [](double u) { return 1.0 / (u * u) + (u > 5.0 ? 0.04 * (u - 5.0) : 0.0); };
        out.push_back({"vD convex tail", "concavity", f});
    }
    {
        CurveFamily f = base;
        auto va = base.vA;
        f.vA = [va](double u) { return va(u) + 0.05; };
        out.push_back({"vA lifted", "crossing", f});
    }
    {
        CurveFamily f = base;
        f.uA = [](double h) { return h - 0.1; };
        f.hA = [](double u) { return u + 0.1; };
        out.push_back({"band inverted", "band-ordering", f});
    }
    {
        CurveFamily f = base;
        auto vs = base.vS;
        f.vS = [vs](double u, double h) { return vs(u, h) + 0.01; };
        out.push_back({"scanning curves shifted", "junction-continuity", f});
    }
    {
        CurveFamily f = base;
        auto ha = base.hA;
        f.hA = [ha](double u) { return ha(u) * 1.01; };
        out.push_back({"hA off by 1%", "inverse", f});
    }
    return out;
}
