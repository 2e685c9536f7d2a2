// Command line front end: run, check, decompose, compare-filippov, list-models.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "asynet/algebra.hpp"
#include "asynet/checks.hpp"
#include "asynet/models.hpp"
#include "asynet/scenario.hpp"

namespace fs = std::filesystem;
using namespace asynet;

namespace {

enum Exit { kOk = 0, kFailed = 1, kZeno = 2, kNoContinuation = 3, kRunError = 4, kUsage = 64 };

// ASYNET_LOG: error, warn (default), info, debug.
int log_level() {
    const char* v = std::getenv("ASYNET_LOG");
    if (!v) return 1;
    std::string s(v);
    if (s == "error" || s == "0") return 0;
    if (s == "info" || s == "2") return 2;
    if (s == "debug" || s == "3") return 3;
    return 1;
}

void log(int level, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (level <= log_level()) std::cerr << "asynet[" << names[level] << "] " << msg << '\n';
}

// A path to a scenario file, or the bare name of a built-in model.
Scenario resolve(const std::string& arg) {
    if (fs::exists(arg)) return load_scenario(arg);
    if (find_preset(arg)) return parse_scenario("{\"preset\": \"" + arg + "\"}", arg);
    throw ScenarioError("no scenario file or model named '" + arg + "'");
}

int cmd_run(const std::string& arg, const std::string& out_dir, std::optional<std::uint64_t> seed, std::optional<double> tmax, bool turns) {
    Scenario sc = resolve(arg);
    if (tmax) {
        sc.config.t_max = *tmax;
        sc.config.validate();
    }
    Network net = build_network(sc);
    log(2, "running '" + net.spec().name + "' for " + format_number(sc.config.t_max) + " s");
    Trajectory tr = run_scenario(sc, net, seed);
    for (const auto& w : tr.warnings) log(1, w);

    fs::create_directories(out_dir);
    OutputOptions opt;
    opt.turns = turns;
    {
        std::ofstream csv(fs::path(out_dir) / "trajectory.csv");
        write_trajectory_csv(csv, net, tr, opt);
    }
    {
        std::ofstream ev(fs::path(out_dir) / "events.json");
        ev << events_json(net, tr, opt).dump(2) << '\n';
    }
    std::cout << "status: " << to_string(tr.status) << "\n";
    std::cout << "t_final: " << format_number(tr.final_state.t) << "\n";
    std::cout << "events: " << tr.events.size() << "\n";
    std::cout << "samples: " << tr.samples.size() << "\n";
    if (tr.status != RunStatus::Error) return kOk;
    std::cout << "error: " << to_string(tr.error) << ": " << tr.message << "\n";
    log(0, tr.message);
    if (tr.error == RunError::Zeno) return kZeno;
    if (tr.error == RunError::NoContinuation) return kNoContinuation;
    return kRunError;
}

std::string state_str(const NetworkState& s) {
    std::string out = "x=(";
    for (std::size_t i = 0; i < s.x.size(); ++i) out += (i ? ", " : "") + format_number(s.x[i]);
    out += ")";
    if (!s.tau.empty()) {
        out += " tau=(";
        for (std::size_t i = 0; i < s.tau.size(); ++i) out += (i ? ", " : "") + format_number(s.tau[i]);
        out += ")";
    }
    return out;
}

int cmd_check(const std::string& arg, int samples, std::uint64_t seed, double margin) {
    Scenario sc = resolve(arg);
    Network net = build_network(sc);
    bool ok = true;
    auto problems = validate_network(net);
    std::cout << "network: " << net.spec().name << " (" << net.node_count() << " nodes, " << net.structure_count() << " structures)\n";
    std::cout << "validate: " << (problems.empty() ? "ok" : "FAILED") << "\n";
    for (const auto& p : problems) std::cout << "  " << p << "\n";
    ok = ok && problems.empty();
    for (int a = 0; a < net.structure_count(); ++a) {
        if (!net.has_field(a)) continue;
        auto rep = check_admissibility(net, a, samples, seed + static_cast<std::uint64_t>(a));
        std::cout << "admissibility " << rep.structure << ": " << rep.violations.size() << " violations, " << rep.warnings.size() << " warnings (" << rep.samples
                  << " samples)\n";
        for (const auto& v : rep.violations) std::cout << "  violation: " << v.message << " [" << v.hits << "/" << v.samples << "]\n";
        for (const auto& w : rep.warnings) std::cout << "  warning: " << w.message << "\n";
        ok = ok && rep.ok();
    }
    auto reg = check_constraint_regularity(net, samples, margin, seed);
    std::cout << "constraint regularity: " << (reg.ok() ? "ok" : "FAILED") << "\n";
    for (const auto& e : reg.entries) {
        std::cout << "  " << e.structure << " node " << e.node << " constraint " << e.constraint << ": " << e.flagged << "/" << e.samples << " flagged";
        if (e.flagged) std::cout << ", e.g. " << state_str(e.example);
        std::cout << "\n";
    }
    ok = ok && reg.ok();
    return ok ? kOk : kFailed;
}

void print_verdict(const char* what, const DecompVerdict& v) {
    std::cout << "    " << what << ": " << (v.pass ? "pass" : "FAILED") << " (" << v.samples << " samples)";
    if (!v.message.empty()) std::cout << " " << v.message;
    std::cout << "\n";
    if (!v.pass && v.counterexample) {
        std::cout << "      counterexample: " << state_str(*v.counterexample) << "\n";
        if (v.counterexample_other) std::cout << "      paired with:    " << state_str(*v.counterexample_other) << "\n";
    }
    if (!v.detail.empty()) std::cout << "      " << v.detail << "\n";
}

int cmd_decompose(const std::string& arg, int samples, std::uint64_t seed) {
    Scenario sc = resolve(arg);
    Network net = build_network(sc);
    Factorization f = factorize(net, samples, seed);
    std::cout << "partition:";
    for (const auto& c : f.partition) {
        std::cout << " {";
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto& name = net.spec().nodes[static_cast<std::size_t>(c[i])].name;
            std::cout << (i ? "," : "") << (name.empty() ? "N" + std::to_string(c[i] + 1) : name);
        }
        std::cout << "}";
    }
    std::cout << "\n";
    for (std::size_t c = 0; c < f.partition.size(); ++c) {
        std::cout << "  component " << c << "\n";
        if (c < f.structural.size()) print_verdict("structural", f.structural[c]);
        if (c < f.dynamical.size()) print_verdict("dynamical", f.dynamical[c]);
    }
    if (f.decomposed) {
        std::cout << "decomposed into " << f.factors.size() << " factors:";
        for (const auto& fac : f.factors) std::cout << " " << fac.spec().name;
        std::cout << "\n";
    } else {
        std::cout << "not decomposed: " << f.reason << "\n";
    }
    return kOk;
}

int cmd_compare(double a, double b, const std::string& v1, const std::string& v2, double x1, double x2, double t_end, int points, double h) {
    TrainsParams p;
    p.a = a;
    p.b = b;
    p.V1 = v1;
    p.V2 = v2;
    p.S = 0.0;
    auto c = compare_filippov(p, {x1, x2}, t_end, points, 1e-4, h);
    std::cout << "sup deviation: " << format_number(c.sup_deviation) << " at t=" << format_number(c.worst_t) << " over " << c.points << " points\n";
    std::cout << (c.pass ? "PASS" : "FAIL") << " (tolerance 1e-4)\n";
    return c.pass ? kOk : kFailed;
}

int cmd_list() {
    for (const auto& p : presets()) {
        std::cout << p.name << "\n    " << p.description << "\n    params:";
        for (const auto& [k, v] : p.defaults) std::cout << " " << k << "=" << format_number(v);
        std::cout << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asynet: simulate and analyse asynchronous networks"};
    app.require_subcommand(1);

    std::string scenario, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> tmax;
    bool turns = false;
    auto* run = app.add_subcommand("run", "integrate a scenario and write trajectory.csv and events.json");
    run->add_option("scenario", scenario, "scenario file or built-in model name")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "seed for stochastic runs");
    run->add_option("--tmax", tmax, "integration duration");
    run->add_flag("--turns", turns, "write circle coordinates in turns instead of radians");

    int samples = 10000;
    std::uint64_t check_seed = 1;
    double margin = 1e-6;
    auto* check = app.add_subcommand("check", "validate, sample admissibility and constraint regularity");
    check->add_option("scenario", scenario, "scenario file or built-in model name")->required();
    check->add_option("--samples", samples, "samples per check");
    check->add_option("--seed", check_seed, "sampling seed");
    check->add_option("--margin", margin, "minimum distance from a constraint region boundary");

    int dsamples = 10000;
    std::uint64_t dseed = 1;
    auto* decompose = app.add_subcommand("decompose", "factorize a network over its connection graph");
    decompose->add_option("scenario", scenario, "scenario file or built-in model name")->required();
    decompose->add_option("--samples", dsamples, "samples per verdict");
    decompose->add_option("--seed", dseed, "sampling seed");

    double a = 1, b = 1, x1 = -1, x2 = 1, t_end = 3, h = 1e-3;
    int points = 301;
    std::string v1 = "1", v2 = "-1";
    auto* cmp = app.add_subcommand("compare-filippov", "compare the zero-threshold trains with the Filippov construction");
    cmp->add_option("--a", a, "left end of the track");
    cmp->add_option("--b", b, "right end of the track");
    cmp->add_option("--v1", v1, "speed of train 1 (expression)");
    cmp->add_option("--v2", v2, "speed of train 2 (expression)");
    cmp->add_option("--x1", x1, "initial position of train 1");
    cmp->add_option("--x2", x2, "initial position of train 2");
    cmp->add_option("--tend", t_end, "end of the comparison grid");
    cmp->add_option("--points", points, "grid points");
    cmp->add_option("--step", h, "integrator step size");

    auto* list = app.add_subcommand("list-models", "list built-in models and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return cmd_run(scenario, out_dir, seed, tmax, turns);
        if (*check) return cmd_check(scenario, samples, check_seed, margin);
        if (*decompose) return cmd_decompose(scenario, dsamples, dseed);
        if (*cmp) return cmd_compare(a, b, v1, v2, x1, x2, t_end, points, h);
        if (*list) return cmd_list();
    } catch (const ScenarioError& e) {
        log(0, e.what());
        return kFailed;
    } catch (const std::exception& e) {
        log(0, e.what());
        return kFailed;
    }
    return kUsage;
}
