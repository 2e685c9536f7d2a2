// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Optional: --cli PATH (the asynet binary) and --scenarios DIR enable the
// exit-code checks of criterion 11.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "asynet/algebra.hpp"
#include "asynet/checks.hpp"
#include "asynet/models.hpp"
#include "asynet/scenario.hpp"

using namespace asynet;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Result {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const EventRecord* first_event(const Network& net, const Trajectory& tr, const std::string& from, const std::string& to) {
    for (const auto& e : tr.events)
        if (e.from >= 0 && e.to >= 0 && net.structure_name(e.from) == from && net.structure_name(e.to) == to) return &e;
    return nullptr;
}

double arrival(const Trajectory& tr, int node) {
    for (const auto& e : tr.events)
        if (e.cause == EventCause::Boundary && e.node == node) return e.t;
    return NAN;
}

Network preset_net(const std::string& name, const std::map<std::string, double>& params = {}) {
    const Preset* p = find_preset(name);
    return p->build(preset_params(*p, params));
}

NetworkState preset_state(const std::string& name, const Network& net, const std::map<std::string, double>& params = {}) {
    const Preset* p = find_preset(name);
    return p->initial(net, preset_params(*p, params));
}

// ---------------------------------------------------------------- 1
Result trains_schedule() {
    Result r;
    double worst = 0.0;
    auto expect = [&](double got, double want, const std::string& what) {
        double d = std::fabs(got - want);
        if (!(d <= 1e-6)) {
            r.pass = false;
            r.detail += what + " at " + fmt(got) + " (want " + fmt(want) + "); ";
        }
        if (std::isfinite(d)) worst = std::max(worst, d);
    };
    IntegratorConfig cfg;
    cfg.h = 1e-3;
    cfg.t_max = 10.0;
    {
        TrainsParams p;
        p.S = 1.0;
        Network net = build_trains(p);
        Trajectory tr = integrate(net, trains_initial_state(net, -1, 1), cfg);
        auto* in = first_event(net, tr, "empty", "beta");
        auto* out = first_event(net, tr, "beta", "empty");
        expect(in ? in->t : NAN, 1.0, "symmetric empty->beta");
        expect(out ? out->t : NAN, 2.0, "symmetric beta->empty");
        expect(arrival(tr, 0), 3.0, "symmetric arrival T1");
        expect(arrival(tr, 1), 3.0, "symmetric arrival T2");
    }
    {
        TrainsParams p;
        p.b = 2.0;
        p.S = 0.0;
        Network net = build_trains(p);
        Trajectory tr = integrate(net, trains_initial_state(net, -1, 2), cfg);
        auto* in = first_event(net, tr, "empty", "alpha1");
        auto* out = first_event(net, tr, "alpha1", "empty");
        expect(in ? in->t : NAN, 1.0, "asymmetric empty->alpha1");
        expect(out ? out->t : NAN, 2.0, "asymmetric alpha1->empty");
        expect(arrival(tr, 1), 3.0, "asymmetric arrival T2");
        expect(arrival(tr, 0), 4.0, "asymmetric arrival T1");
    }
    r.detail = "max |t - oracle| = " + fmt(worst) + (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

// ---------------------------------------------------------------- 2
Result simultaneous_arrival() {
    Result r;
    IntegratorConfig cfg;
    cfg.t_max = 5.0;
    int stops = 0, runs = 0;
    auto count = [&](const Network& net, const Trajectory& tr) {
        ++runs;
        if (tr.status == RunStatus::Error) {
            r.pass = false;
            r.detail += net.spec().name + " failed: " + tr.message + "; ";
        }
        for (const auto& e : tr.events)
            if (e.to >= 0 && net.structure_name(e.to) != "empty") ++stops;
    };
    TrainsParams p;
    p.S = 0.0;
    Network clocked = build_trains(p);
    count(clocked, integrate(clocked, trains_initial_state(clocked, -1, 1), cfg));
    Network zero = build_trains_zero_threshold(p);
    count(zero, integrate(zero, trains_initial_state(zero, -1, 1), cfg));
    if (stops != 0) r.pass = false;
    r.detail = std::to_string(stops) + " stopping events over " + std::to_string(runs) + " zero-threshold runs" + (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

// ---------------------------------------------------------------- 3
Result filippov() {
    Result r;
    Rng rng(2024);
    TrainsParams p;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        double u = uniform01(rng), v = uniform01(rng);
        std::array<double, 2> x0 = k % 2 == 0 ? std::array<double, 2>{-u, v} : std::array<double, 2>{u, -v};
        auto c = compare_filippov(p, x0, 3.0, 301, 1e-4);
        worst = std::max(worst, c.sup_deviation);
        if (!c.pass) {
            r.pass = false;
            r.detail += "x0=(" + fmt(x0[0]) + "," + fmt(x0[1]) + ") dev " + fmt(c.sup_deviation) + "; ";
        }
    }
    r.detail = "20 initial states in x1*x2 <= 0, sup deviation " + fmt(worst) + (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

// ---------------------------------------------------------------- 4
NetworkState phi(const Network& net, const NetworkState& x, double d, const IntegratorConfig& base, Trajectory* keep = nullptr) {
    IntegratorConfig cfg = base;
    cfg.t_max = d;
    Trajectory tr = integrate(net, x, cfg);
    NetworkState out = tr.final_state;
    if (keep) *keep = std::move(tr);
    return out;
}

double state_gap(const Network& net, const NetworkState& a, const NetworkState& b) {
    double g = 0.0;
    for (std::size_t c = 0; c < a.x.size(); ++c) {
        double d = net.factor_of(static_cast<int>(c)).kind == Factor::Kind::Circle ? circular_distance(a.x[c], b.x[c]) : std::fabs(a.x[c] - b.x[c]);
        g = std::max(g, d);
    }
    for (std::size_t c = 0; c < a.tau.size(); ++c) g = std::max(g, std::fabs(a.tau[c] - b.tau[c]));
    return g;
}

Result semiflow() {
    Result r;
    IntegratorConfig cfg;
    const double h = cfg.h;
    double worst = 0.0;
    int done = 0, rejected = 0;
    Rng rng(11);
    auto trial = [&](const Network& net, const NetworkState& x) {
        double s = 10 * h + 3.0 * uniform01(rng), t = 10 * h + 3.0 * uniform01(rng);
        Trajectory full;
        NetworkState a = phi(net, x, s + t, cfg, &full);
        for (const auto& e : full.events) {
            double te = e.t - x.t;
            if (std::fabs(te - s) < 10 * h || std::fabs(te - (s + t)) < 10 * h || te < 10 * h) {
                ++rejected;
                return false;
            }
        }
        NetworkState mid = phi(net, x, s, cfg);
        NetworkState b = phi(net, mid, t, cfg);
        double g = state_gap(net, a, b);
        worst = std::max(worst, g);
        if (!(g < 1e-6)) {
            r.pass = false;
            if (r.detail.size() < 300) r.detail += net.spec().name + " s=" + fmt(s) + " t=" + fmt(t) + " gap " + fmt(g) + "; ";
        }
        ++done;
        return true;
    };
    TrainsParams tp;
    tp.S = 1.0;
    Network trains = build_trains(tp);
    for (int k = 0; k < 100;) {
        NetworkState x = trains.make_state({-uniform01(rng), uniform01(rng)}, {1.5 * uniform01(rng), 1.5 * uniform01(rng), 1.5 * uniform01(rng)});
        if (trial(trains, x)) ++k;
    }
    Network grid = build_powergrid(two_node_grid(0.5, 1.0, 1.0));
    for (int k = 0; k < 100;) {
        NetworkState x = grid.make_state({2 * kPi * uniform01(rng), 2 * uniform01(rng) - 1, 2 * kPi * uniform01(rng), 2 * uniform01(rng) - 1});
        if (trial(grid, x)) ++k;
    }
    r.detail = std::to_string(done) + " triples (" + std::to_string(rejected) + " redrawn near events), max gap " + fmt(worst) + (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

// ---------------------------------------------------------------- 5
std::vector<double> grid_times(double t_end, double dt) {
    std::vector<double> out;
    for (int k = 0; k * dt <= t_end + 1e-12; ++k) out.push_back(k * dt);
    return out;
}

// State at time t: the exact sample, or the frozen final state after termination.
const std::vector<double>* x_at(const Trajectory& tr, double t) {
    if (const Sample* s = tr.sample_at(t)) return &s->x;
    if (tr.status == RunStatus::ReachedTermination && t >= tr.final_state.t) return &tr.final_state.x;
    return nullptr;
}

Result product_equivalence() {
    Result r;
    const std::map<std::string, double> pa = {{"a", 1}, {"b", 1}, {"v1", 1}, {"v2", -1}, {"S", 1}, {"S1", 0}, {"S2", 0}};
    const std::map<std::string, double> pb = {{"a_2", 2}, {"b_2", 1}, {"v1_2", 1}, {"v2_2", -0.5}, {"S_2", 0.5}, {"S1_2", 0}, {"S2_2", 0}};
    std::map<std::string, double> all = pa;
    all.insert(pb.begin(), pb.end());
    Network prod = preset_net("trains_product", all);
    TrainsParams A, B;
    A.S = 1;
    B.a = 2;
    B.b = 1;
    B.V2 = "-0.5";
    B.S = 0.5;
    Network na = build_trains(A), nb = build_trains(B);

    Factorization f = factorize(prod, 2000, 1);
    if (!f.decomposed || f.factors.size() != 2) {
        r.pass = false;
        r.detail = "factorize did not split the product: " + f.reason;
        return r;
    }
    for (std::uint64_t seed : {2, 3, 4, 5}) {
        Factorization g = factorize(prod, 500, seed);
        if (g.partition != f.partition) {
            r.pass = false;
            r.detail += "partition differs for seed " + std::to_string(seed) + "; ";
        }
    }

    IntegratorConfig cfg;
    cfg.t_max = 8.0;
    cfg.output_times = grid_times(8.0, 0.05);
    Rng rng(5);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        double x1 = -0.1 - 0.9 * uniform01(rng), x2 = 0.1 + 0.9 * uniform01(rng);
        double y1 = -0.1 - 1.9 * uniform01(rng), y2 = 0.1 + 0.9 * uniform01(rng);
        Trajectory tp = integrate(prod, prod.make_state({x1, x2, y1, y2}), cfg);
        Trajectory ta = integrate(na, trains_initial_state(na, x1, x2), cfg);
        Trajectory tb = integrate(nb, trains_initial_state(nb, y1, y2), cfg);
        Trajectory tf0 = integrate(f.factors[0], f.factors[0].make_state({x1, x2}), cfg);
        Trajectory tf1 = integrate(f.factors[1], f.factors[1].make_state({y1, y2}), cfg);
        for (double t : cfg.output_times) {
            auto* p = x_at(tp, t);
            auto* a = x_at(ta, t);
            auto* b = x_at(tb, t);
            auto* f0 = x_at(tf0, t);
            auto* f1 = x_at(tf1, t);
            if (!p || !a || !b || !f0 || !f1) {
                r.pass = false;
                r.detail += "missing sample at t=" + fmt(t) + "; ";
                break;
            }
            double g = std::max({std::fabs((*p)[0] - (*a)[0]), std::fabs((*p)[1] - (*a)[1]), std::fabs((*p)[2] - (*b)[0]), std::fabs((*p)[3] - (*b)[1]),
                                 std::fabs((*p)[0] - (*f0)[0]), std::fabs((*p)[1] - (*f0)[1]), std::fabs((*p)[2] - (*f1)[0]), std::fabs((*p)[3] - (*f1)[1])});
            worst = std::max(worst, g);
        }
    }
    if (!(worst <= 1e-9)) r.pass = false;
    r.detail = "10 runs, max componentwise gap " + fmt(worst) + ", partition stable over 5 seeds" + (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

// ---------------------------------------------------------------- 6
Result decomposability() {
    Result r;
    Network first = build_struc_indecomp(false, false);
    auto comps = connection_graph(first).components();
    auto sv = check_structural_decomposability(first, comps.at(0), 10000, 3);
    bool first_ok = !sv.pass && sv.counterexample.has_value();
    Network second = build_struc_indecomp(true, false);
    auto c2 = connection_graph(second).components();
    bool second_ok = true;
    for (const auto& c : c2) {
        second_ok = second_ok && check_structural_decomposability(second, c, 10000, 3).pass;
        second_ok = second_ok && check_dynamical_decomposability(second, c, 10000, 3).pass;
    }
    Factorization f = factorize(second, 10000, 3);
    second_ok = second_ok && f.decomposed && f.factors.size() == 2;
    Network bad = build_struc_indecomp(true, true);
    bool bad_fails = !check_dynamical_decomposability(bad, connection_graph(bad).components().at(0), 10000, 3).pass;
    r.pass = first_ok && second_ok && bad_fails;
    std::string ce;
    if (sv.counterexample) ce = " at x=(" + fmt(sv.counterexample->x[0]) + "," + fmt(sv.counterexample->x[1]) + ")";
    r.detail = std::string("first map: ") + (first_ok ? "structural counterexample" + ce : "no counterexample") + "; second map: " + (second_ok ? "both checks pass, 2 factors" : "FAILED") +
               "; beta field (v1, v2): " + (bad_fails ? "dynamical check fails" : "not caught");
    return r;
}

// ---------------------------------------------------------------- 7
Result power_grid() {
    Result r;
    Network net = build_powergrid(two_node_grid(0.5, 1.0, 1.0));
    IntegratorConfig cfg;
    cfg.t_max = 50.0;
    Trajectory tr = integrate(net, net.make_state({0, 0, 0, 0}), cfg);
    double d = std::remainder(tr.final_state.x[0] - tr.final_state.x[2], 2 * kPi);
    double err = std::fabs(d - std::asin(0.5));
    bool eq_ok = tr.ok() && err < 1e-4 && tr.events.empty();

    Network trip = build_powergrid(two_node_grid(0.5, 1.0, 1.0, 0.4));
    Trajectory tt = integrate(trip, trip.make_state({0, 0, 0, 0}), cfg);
    bool trip_ok = tt.ok() && !tt.events.empty();
    double drift = INFINITY, t_trip = NAN;
    if (trip_ok) {
        const EventRecord& e = tt.events.front();
        t_trip = e.t;
        trip_ok = t_trip < 10.0 && trip.structure_name(e.to) != "intact";
        drift = 0.0;
        const double P[2] = {0.5, -0.5}, D = 1.0, M = 1.0;
        for (const auto& s : tt.samples) {
            if (s.t <= t_trip) continue;
            double u = s.t - t_trip;
            for (int i = 0; i < 2; ++i) {
                double w0 = e.state.x[static_cast<std::size_t>(2 * i + 1)], th0 = e.state.x[static_cast<std::size_t>(2 * i)];
                double w = P[i] / D + (w0 - P[i] / D) * std::exp(-D * u / M);
                double th = th0 + P[i] / D * u + (w0 - P[i] / D) * (M / D) * (1 - std::exp(-D * u / M));
                drift = std::max(drift, std::fabs(s.x[static_cast<std::size_t>(2 * i + 1)] - w));
                drift = std::max(drift, circular_distance(s.x[static_cast<std::size_t>(2 * i)], th));
            }
        }
        trip_ok = trip_ok && drift < 1e-3;
    }
    r.pass = eq_ok && trip_ok;
    r.detail = "|dtheta - asin(0.5)| = " + fmt(err) + " at t=50; trip at t=" + fmt(t_trip) + ", post-trip deviation from decoupled solution " + fmt(drift);
    return r;
}

// ---------------------------------------------------------------- 8
Result aggregate_identity() {
    Result r;
    PowerGridParams p = first_order_ring(5, 1);
    Network net = build_powergrid(p);
    IntegratorConfig cfg;
    cfg.t_max = 20.0;
    cfg.stride = 1;
    Rng rng(8);
    std::vector<double> x0;
    for (int i = 0; i < 5; ++i) x0.push_back(2 * kPi * uniform01(rng));
    Trajectory tr = integrate(net, net.make_state(x0), cfg);
    double sum_w = 0.0;
    for (const auto& n : p.nodes) sum_w += n.omega;
    double worst = 0.0;
    for (const auto& s : tr.samples) {
        NetworkState st = net.make_state(s.x, s.tau, s.t);
        Derivative d = net.eval_field(s.alpha, st);
        double lhs = 0.0;
        for (int i = 0; i < 5; ++i) lhs += p.nodes[static_cast<std::size_t>(i)].D * d.dx[static_cast<std::size_t>(i)];
        worst = std::max(worst, std::fabs(lhs - sum_w));
    }
    r.pass = tr.ok() && tr.events.empty() && worst < 1e-8;
    r.detail = std::to_string(tr.samples.size()) + " samples, max |sum D_i theta_i' - sum omega_i| = " + fmt(worst);
    return r;
}

// ---------------------------------------------------------------- 9
Result oscillator_gate() {
    Result r;
    TrainsParams tp;
    OscillatorParams q;
    q.omega1 = q.omega2 = 0.25;
    q.kc = 0.5;
    q.eps = 0.1;
    Network net = build_trains_oscillators(tp, q);
    IntegratorConfig cfg;
    cfg.h = 1.0 / 1024.0;
    cfg.t_max = 100.0;
    cfg.stride = 1000;
    Rng rng(9);
    int released = 0, tried = 0;
    double latest = 0.0;
    while (tried < 1000) {
        double turns = uniform01(rng);
        if (std::fabs(turns - 0.5) <= 1e-3) continue;
        ++tried;
        Trajectory tr = integrate(net, net.make_state({0.0, 0.0, 0.0, 2 * kPi * turns}, {}), cfg);
        const EventRecord* rel = nullptr;
        for (const auto& e : tr.events)
            if (net.structure_name(e.from) == "beta") {
                rel = &e;
                break;
            }
        if (rel && rel->t < 100.0) {
            ++released;
            latest = std::max(latest, rel->t);
        } else if (r.detail.size() < 200) {
            r.detail += "no release for difference " + fmt(turns) + " turns; ";
        }
    }
    Trajectory anti = integrate(net, net.make_state({0.0, 0.0, 0.0, kPi}, {}), cfg);
    bool held = anti.ok() && anti.status == RunStatus::CompletedTmax && anti.events.empty() && net.structure_name(anti.final_alpha) == "beta" &&
                std::fabs(anti.final_state.t - 100.0) < 1e-9;
    r.pass = released == 1000 && held;
    r.detail = std::to_string(released) + "/1000 released (latest at t=" + fmt(latest) + "); antipodal start " +
               (held ? "held in beta until t=100" : "left beta (status " + to_string(anti.status) + ", " + std::to_string(anti.events.size()) + " events)") +
               (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

// ---------------------------------------------------------------- 10
std::string outputs_of(const Network& net, const Trajectory& tr) {
    std::ostringstream os;
    write_trajectory_csv(os, net, tr);
    os << events_json(net, tr).dump();
    return os.str();
}

Result stochastic() {
    Result r;
    Network net = preset_net("blinking_pair");
    NetworkState x0 = preset_state("blinking_pair", net);
    IntegratorConfig cfg;
    cfg.t_max = 10.0;
    AlphaSampler sampler = uniform_other_sampler(net);
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        cfg.seed = seed;
        Trajectory tr = integrate_stochastic(net, 2.0, sampler, x0, cfg);
        int n = 0;
        for (const auto& e : tr.events) n += e.cause == EventCause::StochasticSwitch;
        total += n;
    }
    double mean = total / 200.0;
    cfg.seed = 7;
    std::string a = outputs_of(net, integrate_stochastic(net, 2.0, sampler, x0, cfg));
    std::string b = outputs_of(net, integrate_stochastic(net, 2.0, sampler, x0, cfg));
    bool same = a == b;
    r.pass = std::fabs(mean - 20.0) <= 1.9 && same;
    r.detail = "mean switch count " + fmt(mean) + " over 200 seeds; seed 7 repeat " + (same ? "byte-identical" : "DIFFERS");
    return r;
}

// ---------------------------------------------------------------- 11
Result robustness(const std::string& cli, const std::string& scen) {
    Result r;
    Network zeno = preset_net("zeno_spiral");
    Trajectory tz = integrate(zeno, preset_state("zeno_spiral", zeno), find_preset("zeno_spiral")->config);
    bool zeno_ok = tz.status == RunStatus::Error && tz.error == RunError::Zeno;

    Network path = preset_net("path");
    Trajectory tp = integrate(path, preset_state("path", path), find_preset("path")->config);
    bool path_ok = tp.status == RunStatus::Error && tp.error == RunError::NoContinuation;

    Network col = build_collision();
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    Trajectory on = integrate(col, col.make_state({0.5, 0.5}), cfg);
    bool frozen = on.ok();
    for (const auto& s : on.samples) frozen = frozen && s.x[0] == 0.5 && s.x[1] == 0.5;
    Trajectory near = integrate(col, col.make_state({0.5 + 1e-6, 0.5}), cfg);
    bool passes = near.ok() && near.events.empty() && std::fabs(near.final_state.x[0] - (3.5 + 1e-6)) < 1e-9 && std::fabs(near.final_state.x[1] + 2.5) < 1e-9;
    Trajectory hit = integrate(col, col.make_state({-1.0, 1.0}), cfg);
    bool stops = hit.ok() && hit.events.size() == 1 && std::fabs(hit.events[0].t - 1.0) < 1e-6 && std::fabs(hit.final_state.x[0]) < 1e-9;
    r.pass = zeno_ok && path_ok && frozen && passes && stops;
    r.detail = std::string("zeno: ") + to_string(tz.error) + ", path: " + to_string(tp.error) + ", collision on diagonal " + (frozen ? "constant" : "MOVES") + ", 1e-6 off " +
               (passes ? "passes" : "STOPS") + ", from (-1,1) " + (stops ? "stops at t=1" : "WRONG");

    if (!cli.empty() && !scen.empty()) {
        auto run = [&](const std::string& file, const std::string& out) {
            std::string cmd = "\"" + cli + "\" run \"" + (fs::path(scen) / file).string() + "\" --out \"" + out + "\" > /dev/null 2>&1";
            int st = std::system(cmd.c_str());
            return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
        };
        fs::path tmp = fs::temp_directory_path() / "asynet_acceptance";
        int cz = run("zeno_spiral.json", (tmp / "zeno").string());
        int cp = run("path_no_sliding.json", (tmp / "path").string());
        int cc = run("collision_diagonal.json", (tmp / "col").string());
        auto last_error = [&](const std::string& dir) {
            std::ifstream in(tmp / dir / "events.json");
            auto j = nlohmann::json::parse(in, nullptr, false);
            if (j.is_discarded() || !j.is_array() || j.empty()) return std::string("none");
            const auto& e = j.back();
            return e.value("cause", "") == "error" ? e.value("error", "") : std::string("none");
        };
        bool cli_ok = cz == 2 && cp == 3 && cc == 0 && last_error("zeno") == "ZenoDetected" && last_error("path") == "NoContinuation" && last_error("col") == "none";
        r.pass = r.pass && cli_ok;
        r.detail += "; cli exit codes zeno=" + std::to_string(cz) + " path=" + std::to_string(cp) + " collision=" + std::to_string(cc) + " (events.json: " + last_error("zeno") + ", " +
                    last_error("path") + ")";
    }
    return r;
}

// ---------------------------------------------------------------- 12
Result validation_suite() {
    Result r;
    int models = 0, checks = 0;
    for (const auto& p : presets()) {
        ++models;
        Network net = p.build(p.defaults);
        auto probs = validate_network(net);
        if (!probs.empty()) {
            r.pass = false;
            r.detail += p.name + ": " + probs.front() + "; ";
        }
        for (int a = 0; a < net.structure_count(); ++a) {
            if (!net.has_field(a)) continue;
            ++checks;
            auto rep = check_admissibility(net, a, 10000, 100 + static_cast<std::uint64_t>(a));
            if (!rep.ok()) {
                r.pass = false;
                r.detail += p.name + "/" + rep.structure + ": " + rep.violations.front().message + "; ";
            }
        }
        auto reg = check_constraint_regularity(net, 10000, 1e-6, 7);
        if (!reg.ok()) {
            r.pass = false;
            r.detail += p.name + ": constraint regularity flagged; ";
        }
    }
    // Corrupt alpha1 so the frozen train keeps moving.
    TrainsParams tp;
    NetworkSpec spec = build_trains(tp).spec();
    spec.fields["alpha1"].coords[0] = Expr::constant(0.5);
    Network bad(spec);
    auto rep = check_admissibility(bad, bad.structure_index("alpha1"), 10000, 5);
    double rate = 0.0;
    for (const auto& v : rep.violations)
        if (v.samples > 0) rate = std::max(rate, static_cast<double>(v.hits) / v.samples);
    bool flagged = !rep.ok() && rate >= 0.99;
    r.pass = r.pass && flagged;
    r.detail = std::to_string(models) + " models, " + std::to_string(checks) + " admissibility checks at 1e4 samples; corrupted field hit rate " + fmt(rate) +
               (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli, scen;
    for (int i = 1; i + 1 < argc; ++i) {
        std::string a = argv[i];
        if (a == "--cli") cli = argv[++i];
        else if (a == "--scenarios") scen = argv[++i];
    }
    struct Criterion {
        const char* name;
        std::function<Result()> run;
    };
    std::vector<Criterion> all = {
        {"trains closed-form schedule", trains_schedule},
        {"simultaneous arrival, zero thresholds", simultaneous_arrival},
        {"Filippov equivalence", filippov},
        {"semiflow law", semiflow},
        {"product equivalence and factorization", product_equivalence},
        {"decomposability certificates", decomposability},
        {"power-grid equilibrium and trip", power_grid},
        {"first-order aggregate identity", aggregate_identity},
        {"oscillator gate", oscillator_gate},
        {"stochastic switching", stochastic},
        {"robustness: Zeno, no continuation, collision", [&] { return robustness(cli, scen); }},
        {"validation suite", validation_suite},
    };
    int failed = 0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        auto t0 = std::chrono::steady_clock::now();
        Result res;
        try {
            res = all[k].run();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("threw: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s - %s: %s (%.1fs)\n", k + 1, res.pass ? "PASS" : "FAIL", all[k].name, res.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !res.pass;
    }
    return failed == 0 ? 0 : 1;
}
