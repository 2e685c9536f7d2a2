#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "asynet/integrator.hpp"
#include "asynet/network.hpp"

namespace asynet {

// Scenario problems carry a 1-based position in the source text when known.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& msg, std::size_t line = 0, std::size_t column = 0);
    std::size_t line;
    std::size_t column;
};

struct StochasticSpec {
    double rate = 1.0;
    std::string sampler = "uniform_other";  // or the name of one structure
};

struct Scenario {
    std::string description;
    std::string preset;                       // empty for a declarative network
    std::map<std::string, double> params;     // preset overrides
    std::optional<NetworkSpec> network;       // declarative form
    std::optional<std::vector<double>> x0;    // defaults to the preset's initial state
    std::optional<std::vector<double>> tau0;
    double t0 = 0.0;
    IntegratorConfig config;                  // fully resolved
    std::optional<StochasticSpec> stochastic;
};

Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::string& path);
nlohmann::ordered_json scenario_to_json(const Scenario& s);
std::string print_scenario(const Scenario& s);  // parse(print(s)) reproduces s

Network build_network(const Scenario& s);
NetworkState initial_state(const Scenario& s, const Network& net);
// Runs the scenario; seed overrides config.seed when given.
Trajectory run_scenario(const Scenario& s, const Network& net, std::optional<std::uint64_t> seed = std::nullopt);

struct OutputOptions {
    bool turns = false;  // circle coordinates divided by 2 pi on output
};

// Header: t, coordinates, clocks, alpha. 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Network& net, const Trajectory& tr, const OutputOptions& opt = {});
// Array of {t, from, to, cause, state}; a failed run ends with an entry whose
// cause is "error" and which also carries "error" and "message".
nlohmann::ordered_json events_json(const Network& net, const Trajectory& tr, const OutputOptions& opt = {});

}  // namespace asynet
