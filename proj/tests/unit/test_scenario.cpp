#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "asynet/scenario.hpp"

using namespace asynet;
namespace fs = std::filesystem;

#ifndef ASYNET_SCENARIO_DIR
#error "ASYNET_SCENARIO_DIR must point at the shipped scenarios"
#endif

namespace {

std::vector<fs::path> shipped() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(ASYNET_SCENARIO_DIR))
        if (e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("shipped scenarios parse and print to a fixpoint") {
    auto files = shipped();
    REQUIRE(files.size() >= 10);
    for (const auto& f : files) {
        INFO(f.string());
        Scenario s = load_scenario(f.string());
        std::string once = print_scenario(s);
        Scenario again = parse_scenario(once, "printed");
        CHECK(print_scenario(again) == once);
        CHECK_NOTHROW(build_network(again));
    }
}

TEST_CASE("undeclared parameter is reported with its position") {
    const std::string text = "{\n  \"preset\": \"trains\",\n  \"params\": {\n    \"S\": 1.0,\n    \"Q\": 2\n  }\n}\n";
    try {
        parse_scenario(text, "t.json");
        FAIL("expected a scenario error");
    } catch (const ScenarioError& e) {
        CHECK(e.line == 5);
        CHECK(e.column == 5);
        CHECK(std::string(e.what()).find("undeclared parameter 'Q'") != std::string::npos);
    }
}

TEST_CASE("unknown keys and bad types are rejected") {
    CHECK_THROWS_AS(parse_scenario(R"({"preset": "trains", "colour": 1})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"preset": "trains", "config": {"h": "small"}})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"preset": "nope"})"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("{\"preset\": "), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"({"preset": "trains", "initial": {"x": [-5, 1]}})"), ScenarioError);
}

TEST_CASE("declarative networks check their references") {
    const std::string bad = R"({
  "network": {
    "name": "n",
    "nodes": [{"name": "A", "factors": ["real"]}],
    "structures": [{"name": "s", "matrix": [[0, 0]], "field": ["k * x[0][0]"]}],
    "events": {"default": "s"}
  },
  "initial": {"x": [1]}
})";
    CHECK_THROWS_AS(parse_scenario(bad), ScenarioError);
    std::string good = bad;
    good.replace(good.find("\"events\""), 0, "\"params\": {\"k\": -1},\n    ");
    Scenario s = parse_scenario(good);
    Network net = build_network(s);
    s.config.t_max = 1.0;
    Trajectory tr = run_scenario(s, net);
    CHECK(tr.final_state.x[0] == Catch::Approx(std::exp(-1.0)).margin(1e-10));
}

TEST_CASE("overrides round-trip through print") {
    Scenario s = parse_scenario(R"({"preset": "trains", "params": {"S": 0.25}, "config": {"t_max": 4}})");
    CHECK(s.params.at("S") == 0.25);
    Scenario t = parse_scenario(print_scenario(s));
    CHECK(t.params.at("S") == 0.25);
    CHECK(t.config.t_max == 4.0);
}

TEST_CASE("csv and events output") {
    Scenario s = parse_scenario(R"({"preset": "trains", "config": {"stride": 100}})");
    Network net = build_network(s);
    Trajectory tr = run_scenario(s, net);
    std::ostringstream csv;
    write_trajectory_csv(csv, net, tr);
    std::string header = csv.str().substr(0, csv.str().find('\n'));
    CHECK(header.rfind("t,", 0) == 0);
    CHECK(header.find("tau[tau1],tau[tau2],tau[tau],alpha") != std::string::npos);

    auto ev = events_json(net, tr);
    REQUIRE(ev.is_array());
    REQUIRE(ev.size() >= 2);
    for (const auto& e : ev) {
        CHECK(e.contains("t"));
        CHECK(e.contains("from"));
        CHECK(e.contains("to"));
        CHECK(e.contains("cause"));
        CHECK(e["state"].contains("x"));
        CHECK(e["state"].contains("tau"));
    }
}

TEST_CASE("failed runs end events with an error entry") {
    Scenario s = load_scenario(std::string(ASYNET_SCENARIO_DIR) + "/zeno_spiral.json");
    Network net = build_network(s);
    Trajectory tr = run_scenario(s, net);
    auto ev = events_json(net, tr);
    REQUIRE_FALSE(ev.empty());
    CHECK(ev.back()["cause"] == "error");
    CHECK(ev.back()["error"] == to_string(RunError::Zeno));
}

TEST_CASE("stochastic scenarios are seed reproducible") {
    Scenario s = load_scenario(std::string(ASYNET_SCENARIO_DIR) + "/blinking_stochastic.json");
    Network net = build_network(s);
    Trajectory a = run_scenario(s, net, 11), b = run_scenario(s, net, 11);
    CHECK(a.final_state.x == b.final_state.x);
    CHECK(a.events.size() == b.events.size());
}
