#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hlwr/curve_model.hpp"
#include "hlwr/errors.hpp"
#include "hlwr/front_tracking.hpp"
#include "hlwr/fv_scheme.hpp"
#include "hlwr/io.hpp"
#include "hlwr/riemann.hpp"
#include "hlwr/sampling.hpp"
#include "hlwr/scenarios.hpp"

namespace fs = std::filesystem;
using namespace hlwr;

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2 };

struct Common {
    std::string family = "builtin";
    std::string out = "out";
    std::string format = "csv";
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct Numeric {
    double dx = 0.01;
    double cfl = 0.9;
    double delta_v = 1e-3;
    double t_end = 10.0;
    std::string left, right;
    std::optional<double> overbrake;
    std::string datum;
    double x_lo = -5.0, x_hi = 5.0;
    bool ring = false;
    int snapshots = 5;
};

HState parse_state(const CurveFamily& fam, const std::string& text, const char* what)
{
    auto comma = text.find(',');
    if (comma == std::string::npos) throw ConfigError(std::string(what) + ": expected u,h");
    HState s;
    try {
        s = {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": cannot parse '" + text + "'");
    }
    if (!in_band(fam, s)) throw ConfigError(std::string(what) + ": state is outside the band");
    return s;
}

struct Problem {
    Datum datum;
    Topology topo;
};

Problem load_problem(const CurveFamily& fam, const Numeric& n)
{
    Problem p;
    if (!n.datum.empty()) {
        json j = read_json(n.datum);
        p.datum = j.get<Datum>();
        if (j.contains("ring")) p.topo = Topology::make_ring(j.at("ring").get<double>());
    } else {
        if (n.left.empty() || n.right.empty()) throw ConfigError("need --datum or both --left and --right");
        p.datum = {{0.0}, {parse_state(fam, n.left, "--left"), parse_state(fam, n.right, "--right")}};
    }
    if (n.ring) p.topo = Topology::make_ring(n.x_hi - n.x_lo);
    return p;
}

std::vector<double> even_times(double t_end, int count)
{
    std::vector<double> ts;
    if (count <= 1) return {t_end};
    for (int i = 0; i < count; ++i) ts.push_back(t_end * i / (count - 1));
    return ts;
}

int cmd_validate(const Common& c, int grid)
{
    CurveFamily fam = load_family(c.family);
    auto rep = validate_family(fam, grid);
    json j = rep;
    j["family"] = fam.name;
    j["grid"] = grid;
    write_text(fs::path(c.out) / "validation.json", dump(j));
    std::printf("%s: %s (%zu violations)\n", fam.name.c_str(), rep.pass ? "pass" : "FAIL", rep.violations.size());
    for (const auto& [name, count] : rep.summary()) std::printf("  %s: %d\n", name.c_str(), count);
    return rep.pass ? kOk : kFail;
}

int cmd_riemann(const Common& c, const Numeric& n)
{
    CurveFamily fam = load_family(c.family);
    if (n.left.empty() || n.right.empty()) throw ConfigError("riemann needs --left and --right");
    const HState l = parse_state(fam, n.left, "--left"), r = parse_state(fam, n.right, "--right");
    RiemannFan fan = n.overbrake ? solve_riemann_overbraking(fam, l, r, *n.overbrake) : solve_riemann(fam, l, r);
    write_text(fs::path(c.out) / "fan.json", dump(json(fan)));
    write_text(fs::path(c.out) / "profile.csv", csv_fan_profile(fam, fan));
    std::printf("case %s:", fan.case_tag.c_str());
    for (const auto& w : fan.waves) std::printf(" %s", to_string(w.kind));
    std::printf("\n");
    return kOk;
}

int cmd_track(const Common& c, const Numeric& n)
{
    CurveFamily fam = load_family(c.family);
    Problem p = load_problem(fam, n);
    TrackOptions o;
    o.delta_v = n.delta_v;
    if (n.overbrake) {
        const double v2 = *n.overbrake;
        o.policy = [v2](const CurveFamily& f, const HState& l, const HState& r,
                        const EventContext& ctx) -> std::optional<RiemannFan> {
            if (ctx.initial && ctx.index == 0) return solve_riemann_overbraking(f, l, r, v2);
            return std::nullopt;
        };
    }
    auto sol = evolve(fam, init_fronts(fam, p.datum, p.topo, o), n.t_end, 1000000, o, even_times(n.t_end, n.snapshots));
    const fs::path dir(c.out);
    write_text(dir / "events.jsonl", events_jsonl(sol.events));
    write_text(dir / "initial.json", dump(json(sol.initial)));
    write_text(dir / "final.json", dump(json(sol.final_set)));
    if (c.format == "json") write_text(dir / "snapshots.json", dump(json(sol.snapshots)));
    else write_text(dir / "snapshots.csv", csv_front_sets(fam, sol.snapshots));
    std::printf("%zu initial fronts, %zu events, %zu final fronts%s\n", sol.initial.fronts.size(), sol.events.size(),
                sol.final_set.fronts.size(), sol.budget_exceeded ? " (event budget exceeded)" : "");
    return sol.budget_exceeded ? kFail : kOk;
}

int cmd_fv(const Common& c, const Numeric& n)
{
    CurveFamily fam = load_family(c.family);
    Problem p = load_problem(fam, n);
    const bool ring = p.topo.ring;
    double lo = n.x_lo, hi = n.x_hi;
    if (ring && !n.ring) {
        lo = -0.5 * p.topo.period;
        hi = 0.5 * p.topo.period;
    }
    auto g = make_grid(fam, p.datum, lo, hi, n.dx, ring);
    FvObservers obs;
    obs.snapshot_times = even_times(n.t_end, n.snapshots);
    obs.v_ref = velocity(fam, p.datum.states.front());
    obs.series_dt = n.t_end / 200.0;
    auto r = run(fam, g, n.t_end, n.cfl, obs);
    const fs::path dir(c.out);
    write_text(dir / "snapshots.csv", csv_grids(fam, r.snapshots));
    write_text(dir / "series.csv", csv_series(r.series));
    std::printf("%ld steps, %zu cells, max clamp %s\n", r.steps, g.size(), format_number(r.max_clamp).c_str());
    return kOk;
}

void write_scenario(const CurveFamily& fam, const fs::path& dir, const ScenarioFile& file, const ScenarioResult& res)
{
    write_text(dir / "scenario.json", dump(json(file)));
    write_text(dir / "report.json", dump(json(res.report)));
    for (const auto& [label, sol] : res.tracked) {
        write_text(dir / (label + "_events.jsonl"), events_jsonl(sol.events));
        write_text(dir / (label + "_snapshots.csv"), csv_front_sets(fam, sol.snapshots));
        write_text(dir / (label + "_final.json"), dump(json(sol.final_set)));
    }
    for (const auto& [label, run] : res.fv) {
        write_text(dir / (label + "_series.csv"), csv_series(run.series));
        write_text(dir / (label + "_snapshots.csv"), csv_grids(fam, run.snapshots));
    }
}

int cmd_scenario(const Common& c, const std::string& name, const std::string& file_path,
                 const std::vector<std::string>& sets, bool list)
{
    if (list) {
        std::cout << dump(json(list_scenarios()));
        return kOk;
    }
    std::vector<ScenarioFile> files;
    if (!file_path.empty()) {
        files.push_back(read_json(file_path).get<ScenarioFile>());
    } else if (name == "all") {
        for (const auto& info : list_scenarios()) files.push_back(default_scenario_file(info.name));
    } else if (!name.empty()) {
        files.push_back(default_scenario_file(name));
    } else {
        throw ConfigError("scenario needs --scenario NAME|all, --file PATH or --list");
    }
    for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        double v = 0.0;
        try {
            v = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("--set: cannot parse '" + kv + "'");
        }
        for (auto& f : files) f.params[kv.substr(0, eq)] = v;
    }
    if (c.family != "builtin")
        for (auto& f : files) f.family = read_json(c.family);

    std::vector<std::optional<ScenarioResult>> results(files.size());
    std::vector<std::string> errors(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < files.size();) {
            try {
                results[k] = run_scenario_file(files[k]);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(c.jobs, static_cast<int>(files.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool all_pass = true, config_error = false;
    json summary = json::object();
    for (std::size_t k = 0; k < files.size(); ++k) {
        if (!results[k]) {
            std::printf("%s: error: %s\n", files[k].name.c_str(), errors[k].c_str());
            config_error = true;
            continue;
        }
        const auto& res = *results[k];
        const CurveFamily fam = family_from_json(files[k].family);
        write_scenario(fam, fs::path(c.out) / files[k].name, files[k], res);
        summary[files[k].name] = res.report.pass();
        all_pass = all_pass && res.report.pass();
        std::printf("%s: %s\n", res.report.name.c_str(), res.report.pass() ? "pass" : "FAIL");
        for (const auto& ch : res.report.checks)
            std::printf("  [%s] %s = %s (%s %s%s)\n", ch.pass ? "pass" : "FAIL", ch.name.c_str(),
                        format_number(ch.measured).c_str(), ch.relation.c_str(), format_number(ch.expected).c_str(),
                        ch.relation == "==" && ch.tolerance > 0.0 ? (" +- " + format_number(ch.tolerance)).c_str() : "");
    }
    write_text(fs::path(c.out) / "summary.json", dump(summary));
    if (config_error) return kUsage;
    return all_pass ? kOk : kFail;
}

int cmd_oracle(const Common& c, const std::string& fan_path, int random_n)
{
    CurveFamily fam = load_family(c.family);
    json out;
    bool all = true;
    if (random_n > 0) {
        Rng rng(c.seed);
        json kinds = json::object();
        for (WaveKind k : {WaveKind::ScS, WaveKind::DS, WaveKind::ScAS, WaveKind::ScDS, WaveKind::ST}) {
            int connected = 0, monotone = 0;
            double gap = 0.0;
            for (int i = 0; i < random_n; ++i) {
                auto rep = viscous_profile_check(fam, random_shock(fam, k, rng));
                connected += rep.connected;
                monotone += rep.monotone;
                gap = std::max(gap, rep.max_endpoint_gap);
            }
            kinds[to_string(k)] = {{"samples", random_n}, {"connected", connected}, {"monotone", monotone},
                                   {"max_endpoint_gap", gap}};
            all = all && connected == random_n && monotone == random_n;
            std::printf("%s: %d/%d connected, %d monotone, max gap %s\n", to_string(k), connected, random_n, monotone,
                        format_number(gap).c_str());
        }
        out = {{"seed", c.seed}, {"kinds", kinds}, {"all_connected", all}};
    } else {
        if (fan_path.empty()) throw ConfigError("oracle needs --fan PATH or --random N");
        RiemannFan fan = read_json(fan_path).get<RiemannFan>();
        json waves = json::array();
        for (std::size_t i = 0; i < fan.waves.size(); ++i) {
            const Wave& w = fan.waves[i];
            if (is_rarefaction(w.kind)) continue;
            auto rep = viscous_profile_check(fam, w);
            json jw = rep;
            jw["index"] = i;
            jw["kind"] = to_string(w.kind);
            waves.push_back(jw);
            all = all && rep.connected;
            std::printf("wave %zu %s: %s\n", i, to_string(w.kind), rep.connected ? "connected" : "NOT connected");
        }
        out = {{"waves", waves}, {"all_connected", all}};
    }
    write_text(fs::path(c.out) / "oracle.json", dump(out));
    return all ? kOk : kFail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hysteretic Lagrangian traffic model: Riemann fans, front tracking, finite volumes, scenarios."};
    app.require_subcommand(1);
    Common c;
    Numeric n;
    int grid = 400, random_n = 0;
    std::string scenario_name, scenario_file, fan_path;
    std::vector<std::string> sets;
    bool list = false;

    auto common = [&](CLI::App* s) {
        s->add_option("--family", c.family, "family JSON path or 'builtin'");
        s->add_option("--out", c.out, "output directory");
        s->add_option("--format", c.format, "snapshot format")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--seed", c.seed, "seed for randomized commands");
        s->add_option("--jobs", c.jobs, "parallel scenario runs")->check(CLI::PositiveNumber);
    };
    auto numeric = [&](CLI::App* s) {
        s->add_option("--left", n.left, "left state u,h");
        s->add_option("--right", n.right, "right state u,h");
        s->add_option("--overbrake", n.overbrake, "over-braking velocity v2");
        s->add_option("--datum", n.datum, "datum JSON {jumps, states[, ring]}");
        s->add_option("--t-end", n.t_end, "horizon")->check(CLI::PositiveNumber);
        s->add_option("--delta-v", n.delta_v, "rarefaction step")->check(CLI::PositiveNumber);
        s->add_option("--dx", n.dx, "cell size")->check(CLI::PositiveNumber);
        s->add_option("--cfl", n.cfl, "CFL number")->check(CLI::Range(1e-6, 1.0));
        s->add_option("--x-lo", n.x_lo, "grid start");
        s->add_option("--x-hi", n.x_hi, "grid end");
        s->add_flag("--ring", n.ring, "periodic grid on [x-lo, x-hi)");
        s->add_option("--snapshots", n.snapshots, "number of evenly spaced snapshots")->check(CLI::PositiveNumber);
    };

    auto* validate = app.add_subcommand("validate", "check the family's structural inequalities");
    common(validate);
    validate->add_option("--grid", grid, "grid points per axis")->check(CLI::PositiveNumber);
    auto* riemann = app.add_subcommand("riemann", "solve one Riemann problem");
    common(riemann);
    numeric(riemann);
    auto* track = app.add_subcommand("track", "front tracking");
    common(track);
    numeric(track);
    auto* fv = app.add_subcommand("fv", "finite-volume scheme");
    common(fv);
    numeric(fv);
    auto* scenario = app.add_subcommand("scenario", "run named scenarios with their checks");
    common(scenario);
    scenario->add_option("--scenario", scenario_name, "scenario name or 'all'");
    scenario->add_option("--file", scenario_file, "scenario JSON file");
    scenario->add_option("--set", sets, "parameter override key=value");
    scenario->add_flag("--list", list, "print the catalog");
    auto* oracle = app.add_subcommand("oracle", "viscous-profile check of a fan's shocks");
    common(oracle);
    oracle->add_option("--fan", fan_path, "fan JSON");
    oracle->add_option("--random", random_n, "check N seeded random shocks per kind instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) return cmd_validate(c, grid);
        if (*riemann) return cmd_riemann(c, n);
        if (*track) return cmd_track(c, n);
        if (*fv) return cmd_fv(c, n);
        if (*scenario) return cmd_scenario(c, scenario_name, scenario_file, sets, list);
        if (*oracle) return cmd_oracle(c, fan_path, random_n);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFail;
    }
    return kUsage;
}
