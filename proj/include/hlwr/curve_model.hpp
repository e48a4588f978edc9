#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hlwr {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// Hysteretic fundamental diagram in spacing coordinates.
///
/// Any record filling these maps is a family; validate_family() decides
/// whether it is usable.
struct CurveFamily {
    std::string name;
    double vbar = 1.0;
    double u0A = 2.0;
    double u_c = 4.0;
    double v_c = 0.75;
    double h_c = 4.0;

    Fn1 vA, vD, dvA, dvD;
    Fn2 vS, dvS_u;
    Fn1 uA, uD, hA, hD;
};

/// Coefficients of the generalized default family.
struct CustomParams {
    double vbar = 1.0;
    double u0A = 2.0;
    double band_congested = 0.15; ///< u^A(h) = u0A sqrt(h) (1 + a (1 - h/h_c)) for h <= h_c
    double band_free = 0.2;       ///< u^A(h) = h + b (h - h_c) for h > h_c
    double beta = 3.0;            ///< phi(t) = t (beta - t) / (beta - 1)
};

CurveFamily make_custom_family(const CustomParams& p, std::string name = "custom");
CurveFamily make_default_family();

/// `{"builtin":"default-concave-v1"}` or `{"custom":{...}}`.
CurveFamily family_from_json(const nlohmann::json& j);
/// Accepts a file path or the literal builtin name.
CurveFamily load_family(const std::string& path_or_builtin);

struct HState {
    double u = 1.0;
    double h = 1.0;
    friend bool operator==(const HState&, const HState&) = default;
};

enum class DriverMode { Acceleration, Deceleration, Scanning };
const char* to_string(DriverMode m);

double velocity(const CurveFamily& fam, const HState& s);
double velocity(const CurveFamily& fam, double u, double h);

/// Derivative in u of the branch the state sits on. At a junction the larger
/// one-sided slope is returned.
double branch_slope(const CurveFamily& fam, const HState& s);

DriverMode mode_of(const CurveFamily& fam, const HState& s, int du_dt_sign);

bool in_band(const CurveFamily& fam, const HState& s, double tol = 1e-9);
bool on_accel(const CurveFamily& fam, const HState& s, double tol = 1e-9);
bool on_decel(const CurveFamily& fam, const HState& s, double tol = 1e-9);

/// Inverses of the extremal and scanning curves.
double inv_vA(const CurveFamily& fam, double v);
double inv_vD(const CurveFamily& fam, double v);
double inv_vS(const CurveFamily& fam, double v, double h);

/// In-band state at spacing u whose velocity is v (h solved between h^A(u) and h^D(u)).
HState state_at(const CurveFamily& fam, double u, double v);
/// In-band state on a fixed scanning curve whose velocity is v.
HState state_on_scanning(const CurveFamily& fam, double h, double v);
HState state_on_accel(const CurveFamily& fam, double u);
HState state_on_decel(const CurveFamily& fam, double u);

HState from_eulerian(double rho, double h);
std::pair<double, double> to_eulerian(const HState& s);

struct Violation {
    std::string check;
    double u = 0.0;
    double h = 0.0;
    double amount = 0.0;
};

struct ValidationReport {
    bool pass = true;
    std::vector<Violation> violations;
    /// Violations grouped by check name, in first-seen order.
    std::vector<std::pair<std::string, int>> summary() const;
    bool has(const std::string& check) const;
};

struct FamilyWindow {
    double h_lo = 1.0;
    double h_hi = 9.0;
    double u_lo = 1.0;
    double u_hi = 12.0;
};

ValidationReport validate_family(const CurveFamily& fam, int grid_n, const FamilyWindow& win = {});

} // namespace hlwr
