#include <doctest.h>

#include <algorithm>
#include <set>

#include "hlwr/errors.hpp"
#include "hlwr/io.hpp"
#include "hlwr/scenarios.hpp"

using namespace hlwr;

namespace {
const CurveFamily fam = make_default_family();
}

TEST_CASE("catalogue lists the ten scenarios")
{
    std::set<std::string> names;
    for (const auto& s : list_scenarios()) {
        names.insert(s.name);
        CHECK_FALSE(s.checks.empty());
        CHECK((s.engine == "tracking" || s.engine == "fv" || s.engine == "both"));
        for (const auto& p : s.params) CHECK((p.min <= p.value && p.value <= p.max));
    }
    const std::set<std::string> want{"car_train",         "stop_and_go",       "temp_bottleneck",       "ring_road",
                                     "free_zone_disturbance", "decay_sparse_upstream", "faster_downstream",
                                     "small_perturbation", "underspeed_on_vD",  "over_braking"};
    CHECK(names == want);
    CHECK_THROWS_AS(scenario_info("nope"), ConfigError);
}

TEST_CASE("check relations")
{
    CHECK(evaluate({"a", "<", 1.0, 0.0}, 0.5));
    CHECK_FALSE(evaluate({"a", "<", 1.0, 0.0}, 1.0));
    CHECK(evaluate({"a", "<=", 1.0, 0.0}, 1.0));
    CHECK(evaluate({"a", ">", 1.0, 0.0}, 1.5));
    CHECK(evaluate({"a", ">=", 1.0, 0.0}, 1.0));
    CHECK(evaluate({"a", "==", 0.5, 0.1}, 0.58));
    CHECK_FALSE(evaluate({"a", "==", 0.5, 0.1}, 0.7));
    CHECK_THROWS_AS(evaluate({"a", "~", 0.5, 0.1}, 0.5), ConfigError);
}

TEST_CASE("overrides are checked against the schema")
{
    CHECK_THROWS_AS(run_scenario("stop_and_go", {{"bogus", 1.0}}), ConfigError);
    const auto& info = scenario_info("stop_and_go");
    CHECK_THROWS_AS(run_scenario("stop_and_go", {{info.params.front().name, info.params.front().max + 1.0}}),
                    ConfigError);
    auto res = run_scenario("stop_and_go", {{"t_end", 5.0}});
    CHECK(res.report.params.at("t_end") == 5.0);
    CHECK(res.report.pass());
}

TEST_CASE("fast scenarios pass their built-in checks")
{
    for (const char* name : {"car_train", "stop_and_go", "temp_bottleneck", "free_zone_disturbance",
                             "decay_sparse_upstream", "faster_downstream", "underspeed_on_vD", "over_braking"}) {
        CAPTURE(name);
        auto res = run_scenario(name);
        for (const auto& c : res.report.checks) {
            CAPTURE(c.name);
            CAPTURE(c.measured);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("shipped scenario files equal the defaults")
{
    for (const auto& s : list_scenarios()) {
        CAPTURE(s.name);
        const auto j = read_json(std::string(HLWR_SOURCE_DIR) + "/scenarios/" + s.name + ".json");
        CHECK(j.get<ScenarioFile>() == default_scenario_file(s.name));
    }
}

TEST_CASE("a file check replaces the built-in rule")
{
    ScenarioFile f = default_scenario_file("stop_and_go");
    f.checks = {{"front_count", "==", 3.0, 0.0}};
    auto res = run_scenario_file(f);
    REQUIRE(res.report.checks.size() == 1);
    CHECK_FALSE(res.report.pass());
    f.checks = {{"no_such_metric", "<", 1.0, 0.0}};
    CHECK_THROWS_AS(run_scenario_file(f), ConfigError);
}

TEST_CASE("plateaus and zones on hand-built pieces")
{
    // two flat levels joined by a short ramp
    std::vector<Piece> ps{{0, 5, {3.0, 3.0}}, {5, 5.2, {3.3, 3.0}}, {5.2, 10, {3.5, 3.0}}, {10, 12, {3.01, 3.0}}};
    auto lv = spacing_plateaus(ps);
    REQUIRE(lv.size() == 2);
    // merged levels keep the lowest run mean
    CHECK(lv[0] == 3.0);
    CHECK(lv[1] == doctest::Approx(3.5));

    FrontSet fs;
    fs.states = {{3.5, 3.0}, {3.05, 3.0}, {3.5, 3.0}};
    fs.fronts = {{-1.0, 0.0, -0.1, WaveKind::ScS}, {0.0, 0.0, -0.05, WaveKind::ScR}};
    CHECK(zone_width(fs, 0.0, [](const HState& s) { return s.u < 3.2; }) == doctest::Approx(1.0));
    CHECK(zone_width(fs, 2.0, [](const HState& s) { return s.u < 3.2; }) == doctest::Approx(1.1));
    CHECK(velocity_levels(fam, fs).size() == 2);
}
