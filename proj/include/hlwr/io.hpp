#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlwr/curve_model.hpp"
#include "hlwr/front_tracking.hpp"
#include "hlwr/fv_scheme.hpp"
#include "hlwr/riemann.hpp"
#include "hlwr/scenarios.hpp"
#include "hlwr/wave_theory.hpp"

namespace hlwr {

using nlohmann::json;

void to_json(json& j, const HState& s);
void from_json(const json& j, HState& s);
void to_json(json& j, const Wave& w);
void from_json(const json& j, Wave& w);
void to_json(json& j, const RiemannFan& f);
void from_json(const json& j, RiemannFan& f);
void to_json(json& j, const Front& f);
void from_json(const json& j, Front& f);
void to_json(json& j, const Topology& t);
void from_json(const json& j, Topology& t);
void to_json(json& j, const FrontSet& fs);
void from_json(const json& j, FrontSet& fs);
void to_json(json& j, const Event& e);
void from_json(const json& j, Event& e);
void to_json(json& j, const Datum& d);
void from_json(const json& j, Datum& d);
void to_json(json& j, const ParamSpec& p);
void from_json(const json& j, ParamSpec& p);
void to_json(json& j, const CheckSpec& c);
void from_json(const json& j, CheckSpec& c);
void to_json(json& j, const ScenarioInfo& s);
void from_json(const json& j, ScenarioInfo& s);
void to_json(json& j, const CheckResult& c);
void from_json(const json& j, CheckResult& c);
void to_json(json& j, const ScenarioReport& r);
void from_json(const json& j, ScenarioReport& r);
void to_json(json& j, const ScenarioFile& f);
void from_json(const json& j, ScenarioFile& f);
void to_json(json& j, const ValidationReport& r);
void to_json(json& j, const ProfileReport& r);

/// "%.17g".
std::string format_number(double x);

/// One event per line.
std::string events_jsonl(const std::vector<Event>& events);
std::vector<Event> parse_events_jsonl(const std::string& text);

/// t,x,u,h,v; each constant piece contributes its two end points.
std::string csv_front_sets(const CurveFamily& fam, const std::vector<FrontSet>& sets);
/// t,i,x,u,h,v with x the cell centre.
std::string csv_grids(const CurveFamily& fam, const std::vector<GridState>& grids);
/// t,tv_v,sup_dev
std::string csv_series(const std::vector<SeriesPoint>& series);
/// xi,u,h,v sampled through the fan at t = 1.
std::string csv_fan_profile(const CurveFamily& fam, const RiemannFan& fan, int n = 401);

/// Pretty JSON with a trailing newline.
std::string dump(const json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

} // namespace hlwr
