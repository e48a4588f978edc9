#include "hlwr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hlwr/errors.hpp"

namespace hlwr {

namespace {

double num(const json& j)
{
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json num_json(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return x;
}

std::string row(std::initializer_list<double> xs)
{
    std::string out;
    bool first = true;
    for (double x : xs) {
        if (!first) out += ',';
        out += format_number(x);
        first = false;
    }
    out += '\n';
    return out;
}

} // namespace

void to_json(json& j, const HState& s) { j = json{{"u", s.u}, {"h", s.h}}; }
void from_json(const json& j, HState& s)
{
    s.u = j.at("u").get<double>();
    s.h = j.at("h").get<double>();
}

void to_json(json& j, const Wave& w)
{
    j = json{{"kind", to_string(w.kind)}, {"left", w.left}, {"right", w.right}};
    if (is_rarefaction(w.kind)) j["fan"] = {w.fan[0], w.fan[1]};
    else j["speed"] = w.speed;
}
void from_json(const json& j, Wave& w)
{
    w.kind = wave_kind_from_string(j.at("kind").get<std::string>());
    w.left = j.at("left").get<HState>();
    w.right = j.at("right").get<HState>();
    w.speed = j.value("speed", 0.0);
    w.fan = {0.0, 0.0};
    if (j.contains("fan")) w.fan = {j.at("fan").at(0).get<double>(), j.at("fan").at(1).get<double>()};
}

void to_json(json& j, const RiemannFan& f)
{
    j = json{{"left", f.left}, {"right", f.right}, {"case", f.case_tag}, {"waves", f.waves}};
}
void from_json(const json& j, RiemannFan& f)
{
    f.left = j.at("left").get<HState>();
    f.right = j.at("right").get<HState>();
    f.case_tag = j.at("case").get<std::string>();
    f.waves = j.at("waves").get<std::vector<Wave>>();
}

void to_json(json& j, const Front& f)
{
    j = json{{"kind", to_string(f.kind)}, {"x0", f.x0}, {"t0", f.t0}, {"speed", f.speed}};
}
void from_json(const json& j, Front& f)
{
    f.kind = wave_kind_from_string(j.at("kind").get<std::string>());
    f.x0 = j.at("x0").get<double>();
    f.t0 = j.at("t0").get<double>();
    f.speed = j.at("speed").get<double>();
}

void to_json(json& j, const Topology& t)
{
    j = t.ring ? json{{"ring", true}, {"period", t.period}} : json{{"ring", false}};
}
void from_json(const json& j, Topology& t)
{
    t.ring = j.at("ring").get<bool>();
    t.period = t.ring ? j.at("period").get<double>() : 0.0;
}

void to_json(json& j, const FrontSet& fs)
{
    j = json{{"t", fs.t}, {"topology", fs.topo}, {"fronts", fs.fronts}, {"states", fs.states}};
}
void from_json(const json& j, FrontSet& fs)
{
    fs.t = j.at("t").get<double>();
    fs.topo = j.at("topology").get<Topology>();
    fs.fronts = j.at("fronts").get<std::vector<Front>>();
    fs.states = j.at("states").get<std::vector<HState>>();
    if (fs.states.size() != fs.fronts.size() + 1) throw ConfigError("front set: need one more state than fronts");
}

namespace {

json waves_of(const std::vector<Front>& fronts, const std::vector<HState>& states)
{
    json arr = json::array();
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        json w = fronts[k];
        if (k + 1 < states.size()) {
            w["left"] = states[k];
            w["right"] = states[k + 1];
        }
        arr.push_back(std::move(w));
    }
    return arr;
}

} // namespace

void to_json(json& j, const Event& e)
{
    j = json{{"t", e.t},
             {"x", e.x},
             {"case", e.case_tag},
             {"rotate", e.rotate},
             {"first", e.first},
             {"in", waves_of(e.in, e.in_states)},
             {"out", waves_of(e.out, e.out_states)},
             {"in_states", e.in_states},
             {"out_states", e.out_states}};
}
void from_json(const json& j, Event& e)
{
    e.t = j.at("t").get<double>();
    e.x = j.at("x").get<double>();
    e.case_tag = j.at("case").get<std::string>();
    e.rotate = j.at("rotate").get<std::size_t>();
    e.first = j.at("first").get<std::size_t>();
    e.in = j.at("in").get<std::vector<Front>>();
    e.out = j.at("out").get<std::vector<Front>>();
    e.in_states = j.at("in_states").get<std::vector<HState>>();
    e.out_states = j.at("out_states").get<std::vector<HState>>();
}

void to_json(json& j, const Datum& d) { j = json{{"jumps", d.jumps}, {"states", d.states}}; }
void from_json(const json& j, Datum& d)
{
    d.jumps = j.at("jumps").get<std::vector<double>>();
    d.states = j.at("states").get<std::vector<HState>>();
    if (d.states.size() != d.jumps.size() + 1) throw ConfigError("datum: need one more state than jumps");
}

void to_json(json& j, const ParamSpec& p)
{
    j = json{{"name", p.name}, {"default", p.value}, {"min", p.min}, {"max", p.max}, {"meaning", p.meaning}};
}
void from_json(const json& j, ParamSpec& p)
{
    p.name = j.at("name").get<std::string>();
    p.value = j.at("default").get<double>();
    p.min = j.at("min").get<double>();
    p.max = j.at("max").get<double>();
    p.meaning = j.value("meaning", "");
}

void to_json(json& j, const CheckSpec& c)
{
    j = json{{"name", c.name}, {"relation", c.relation}, {"expected", c.expected}, {"tolerance", c.tolerance}};
}
void from_json(const json& j, CheckSpec& c)
{
    c.name = j.at("name").get<std::string>();
    c.relation = j.at("relation").get<std::string>();
    c.expected = j.at("expected").get<double>();
    c.tolerance = j.value("tolerance", 0.0);
}

void to_json(json& j, const ScenarioInfo& s)
{
    j = json{{"name", s.name}, {"engine", s.engine}, {"summary", s.summary}, {"params", s.params}, {"checks", s.checks}};
}
void from_json(const json& j, ScenarioInfo& s)
{
    s.name = j.at("name").get<std::string>();
    s.engine = j.at("engine").get<std::string>();
    s.summary = j.value("summary", "");
    s.params = j.at("params").get<std::vector<ParamSpec>>();
    s.checks = j.at("checks").get<std::vector<CheckSpec>>();
}

void to_json(json& j, const CheckResult& c)
{
    j = json{{"name", c.name},           {"pass", c.pass},           {"measured", num_json(c.measured)},
             {"expected", c.expected},   {"tolerance", c.tolerance}, {"relation", c.relation}};
}
void from_json(const json& j, CheckResult& c)
{
    c.name = j.at("name").get<std::string>();
    c.pass = j.at("pass").get<bool>();
    c.measured = num(j.at("measured"));
    c.expected = j.at("expected").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    c.relation = j.at("relation").get<std::string>();
}

void to_json(json& j, const ScenarioReport& r)
{
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = num_json(v);
    j = json{{"name", r.name},     {"engine", r.engine},   {"family", r.family}, {"pass", r.pass()},
             {"params", r.params}, {"checks", r.checks}, {"metrics", metrics}};
}
void from_json(const json& j, ScenarioReport& r)
{
    r.name = j.at("name").get<std::string>();
    r.engine = j.at("engine").get<std::string>();
    r.family = j.at("family").get<std::string>();
    r.params = j.at("params").get<std::map<std::string, double>>();
    r.checks = j.at("checks").get<std::vector<CheckResult>>();
    r.metrics.clear();
    for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = num(v);
}

void to_json(json& j, const ScenarioFile& f)
{
    j = json{{"name", f.name}, {"engine", f.engine}, {"family", f.family}, {"params", f.params}, {"checks", f.checks}};
}
void from_json(const json& j, ScenarioFile& f)
{
    f.name = j.at("name").get<std::string>();
    f.engine = j.value("engine", "");
    f.family = j.value("family", json{{"builtin", "default-concave-v1"}});
    f.params = j.value("params", std::map<std::string, double>{});
    f.checks = j.value("checks", std::vector<CheckSpec>{});
}

void to_json(json& j, const ValidationReport& r)
{
    json summary = json::object();
    for (const auto& [name, n] : r.summary()) summary[name] = n;
    json first = json::array();
    for (std::size_t k = 0; k < r.violations.size() && k < 20; ++k) {
        const auto& v = r.violations[k];
        first.push_back({{"check", v.check}, {"u", v.u}, {"h", v.h}, {"amount", v.amount}});
    }
    j = json{{"pass", r.pass}, {"violations", r.violations.size()}, {"by_check", summary}, {"first", first}};
}

void to_json(json& j, const ProfileReport& r)
{
    j = json{{"connected", r.connected}, {"monotone", r.monotone}, {"max_endpoint_gap", r.max_endpoint_gap},
             {"steps", r.steps},         {"left_window", r.left_window}, {"note", r.note}};
}

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string events_jsonl(const std::vector<Event>& events)
{
    std::string out;
    for (const auto& e : events) {
        out += json(e).dump();
        out += '\n';
    }
    return out;
}

std::vector<Event> parse_events_jsonl(const std::string& text)
{
    std::vector<Event> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line).get<Event>());
    return out;
}

std::string csv_front_sets(const CurveFamily& fam, const std::vector<FrontSet>& sets)
{
    std::string out = "t,x,u,h,v\n";
    for (const auto& fs : sets)
        for (const auto& p : pieces(fs, fs.t)) {
            const double v = velocity(fam, p.state);
            out += row({fs.t, p.a, p.state.u, p.state.h, v});
            out += row({fs.t, p.b, p.state.u, p.state.h, v});
        }
    return out;
}

std::string csv_grids(const CurveFamily& fam, const std::vector<GridState>& grids)
{
    std::string out = "t,i,x,u,h,v\n";
    for (const auto& g : grids)
        for (std::size_t i = 0; i < g.size(); ++i)
            out += row({g.t, static_cast<double>(i), g.center(i), g.u[i], g.h[i], velocity(fam, g.state(i))});
    return out;
}

std::string csv_series(const std::vector<SeriesPoint>& series)
{
    std::string out = "t,tv_v,sup_dev\n";
    for (const auto& p : series) out += row({p.t, p.tv_v, p.sup_dev});
    return out;
}

std::string csv_fan_profile(const CurveFamily& fam, const RiemannFan& fan, int n)
{
    std::string out = "xi,u,h,v\n";
    double lo = -0.05, hi = 0.05;
    for (const auto& w : fan.waves) {
        lo = std::min(lo, w.left_edge() - 0.05);
        hi = std::max(hi, w.right_edge() + 0.05);
    }
    for (int i = 0; i < n; ++i) {
        const double xi = lo + (hi - lo) * i / (n - 1);
        HState s = fan.left;
        for (const auto& w : fan.waves) {
            if (xi < w.left_edge()) break;
            s = xi >= w.right_edge() ? w.right : rarefaction_state(fam, w, xi);
        }
        out += row({xi, s.u, s.h, velocity(fam, s)});
    }
    return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::filesystem::path& path)
{
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

} // namespace hlwr
