#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlwr/curve_model.hpp"
#include "hlwr/front_tracking.hpp"
#include "hlwr/fv_scheme.hpp"

namespace hlwr {

struct ParamSpec {
    std::string name;
    double value = 0.0; ///< default
    double min = 0.0;
    double max = 0.0;
    std::string meaning;

    friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

/// Pass rule for one measured quantity. Relations: "<", "<=", ">", ">=", and
/// "==" meaning |measured - expected| <= tolerance.
struct CheckSpec {
    std::string name;
    std::string relation;
    double expected = 0.0;
    double tolerance = 0.0;

    friend bool operator==(const CheckSpec&, const CheckSpec&) = default;
};

struct ScenarioInfo {
    std::string name;
    std::string engine; ///< tracking, fv or both
    std::string summary;
    std::vector<ParamSpec> params;
    std::vector<CheckSpec> checks;

    friend bool operator==(const ScenarioInfo&, const ScenarioInfo&) = default;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string relation;

    friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct ScenarioReport {
    std::string name;
    std::string engine;
    std::string family;
    std::map<std::string, double> params;
    std::vector<CheckResult> checks;
    std::map<std::string, double> metrics; ///< informational, not judged

    bool pass() const;
    friend bool operator==(const ScenarioReport&, const ScenarioReport&) = default;
};

/// Solutions kept for export, keyed by run label (e.g. "tracking", "fv_moderate").
struct ScenarioResult {
    ScenarioReport report;
    std::map<std::string, TrackedSolution> tracked;
    std::map<std::string, FvRun> fv;
    std::vector<double> snapshot_times;
};

std::vector<ScenarioInfo> list_scenarios();
const ScenarioInfo& scenario_info(const std::string& name);

bool evaluate(const CheckSpec& spec, double measured);

/// Overrides must name declared parameters and lie within their ranges.
ScenarioResult run_scenario(const std::string& name, const std::map<std::string, double>& overrides = {},
                            const CurveFamily& fam = make_default_family());

/// Scenario file: {name, engine, family, params, checks}. File checks replace the built-in rules.
struct ScenarioFile {
    std::string name;
    std::string engine;
    nlohmann::json family;
    std::map<std::string, double> params;
    std::vector<CheckSpec> checks;

    friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

ScenarioFile default_scenario_file(const std::string& name);
ScenarioResult run_scenario_file(const ScenarioFile& file);

// Measurement helpers shared with the tests.

struct Piece {
    double a = 0.0;
    double b = 0.0;
    HState state;
};

/// Constant pieces at time t. Open lane: the two unbounded pieces are cut to
/// [first front - margin, last front + margin]. Ring: one period starting at the first front.
std::vector<Piece> pieces(const FrontSet& fs, double t, double margin = 2.0);

/// Total length of bounded pieces whose state satisfies `pred` (unbounded pieces are skipped).
double zone_width(const FrontSet& fs, double t, const std::function<bool(const HState&)>& pred);

/// Distinct spacing plateaus: runs at least `min_len` long whose spacing spread stays
/// within `rel_tol` of the overall spread; values closer than that tolerance count once.
std::vector<double> spacing_plateaus(const std::vector<Piece>& ps, double min_len = 1.0, double rel_tol = 0.1);

/// Distinct velocities over the states, merged within tol.
std::vector<double> velocity_levels(const CurveFamily& fam, const FrontSet& fs, double tol = 1e-9);

/// Calls `visit` with the front set right after each event, in order.
void replay(const TrackedSolution& sol, const std::function<void(const FrontSet&, const Event&)>& visit);

/// L1 distance of u plus L1 distance of v between FV cells and exact cell averages of the tracked set.
double l1_distance(const CurveFamily& fam, const GridState& g, const FrontSet& fs);

} // namespace hlwr
