#include "asynet/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "asynet/algebra.hpp"
#include "asynet/checks.hpp"

namespace asynet {

namespace {

constexpr double kPi = std::numbers::pi;

ConnectionStructure make_structure(int k, const std::vector<std::pair<int, int>>& constraints, const std::vector<std::pair<int, int>>& edges) {
    ConnectionStructure c(k);
    for (auto [i, ell] : constraints) c.set_constraint(i, ell);
    for (auto [i, j] : edges) c.set_edge(i, j);
    return c;
}

void add_structure(NetworkSpec& n, const std::string& name, ConnectionStructure st, const std::vector<std::string>& coords, std::vector<int> rates = {}) {
    n.structure_names.push_back(name);
    n.structures.push_back(std::move(st));
    VectorFieldSpec f;
    for (const auto& c : coords) f.coords.push_back(Expr::parse(c));
    f.clock_rates = std::move(rates);
    n.fields[name] = std::move(f);
}

ConstraintSpec freeze(int node, int index, std::vector<int> coords) {
    ConstraintSpec c;
    c.node = node;
    c.index = index;
    c.region = Predicate::always();
    c.frozen = std::move(coords);
    return c;
}

void rule(NetworkSpec& n, const std::string& when, const std::string& target) { n.events.rules.push_back({Predicate::parse(when), target}); }

std::string num(double v) { return format_number(v); }

}  // namespace

// ---------------------------------------------------------------- trains

void TrainsParams::validate() const {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("track extents a and b must be positive");
    for (double s : {S, S1, S2, T1, T2})
        if (!(s >= 0)) throw std::invalid_argument("thresholds and start delays must be non-negative");
    Expr::parse(V1);
    Expr::parse(V2);
}

void OscillatorParams::validate() const {
    if (!(kc > 0)) throw std::invalid_argument("coupling gain kc must be positive");
    if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("sync tolerance eps must lie in (0, 0.5) turns");
}

bool oscillator_gate_feasible(const OscillatorParams& q, std::string* why) {
    double gap = std::fabs(q.omega1 - q.omega2) / (2.0 * kPi);
    double ratio = gap / (2.0 * q.kc);
    bool ok = ratio < 1.0 && std::asin(ratio) < 2.0 * kPi * q.eps;
    if (!ok && why) {
        std::ostringstream os;
        os << "oscillators lock at a phase gap of " << (ratio < 1.0 ? num(std::asin(ratio)) : std::string("none (no locking)")) << " rad, which is not below 2 pi eps = " << num(2.0 * kPi * q.eps)
           << "; the gate may never open";
        *why = os.str();
    }
    return ok;
}

namespace {

Network trains_network(const TrainsParams& p, const OscillatorParams* osc, const std::string& name) {
    p.validate();
    if (osc) osc->validate();
    const bool delay1 = p.T1 > 0, delay2 = p.T2 > 0;
    const bool delays = delay1 || delay2;
    const int ell_stop = 1, ell_wait = 2;

    NetworkSpec n;
    n.name = name;
    for (int i = 0; i < 2; ++i) {
        NodeSpec node;
        node.name = "T" + std::to_string(i + 1);
        node.factors.push_back(Factor::interval(-p.a, p.b));
        if (osc) node.factors.push_back(Factor::circle());
        node.constraint_count = delays ? 2 : 1;
        n.nodes.push_back(node);
    }
    n.params = {{"a", p.a}, {"b", p.b}, {"S", p.S}, {"S1", p.S1}, {"S2", p.S2}};
    if (delay1) n.params["T1"] = p.T1;
    if (delay2) n.params["T2"] = p.T2;
    if (osc) {
        n.params["w1"] = osc->omega1;
        n.params["w2"] = osc->omega2;
        n.params["kc"] = osc->kc;
        n.params["eps"] = osc->eps;
    }
    n.clocks = {{"tau1", true}, {"tau2", true}, {"tau", true}};
    if (delays) n.clocks.push_back({"depart", false});

    const std::string v1 = "(" + p.V1 + ")", v2 = "(" + p.V2 + ")";
    // Per structure: (train 1 stopped, train 2 stopped, clock rates)
    auto coords = [&](bool stop1, bool stop2, bool coupled) {
        std::vector<std::string> c;
        c.push_back(stop1 ? "0" : v1);
        if (osc) c.push_back(coupled ? "w1 + 2*pi*kc*sin(x[1][1] - x[0][1])" : "w1");
        c.push_back(stop2 ? "0" : v2);
        if (osc) c.push_back(coupled ? "w2 + 2*pi*kc*sin(x[0][1] - x[1][1])" : "w2");
        return c;
    };
    auto rates = [&](int r1, int r2, int r) {
        std::vector<int> v{r1, r2, r};
        if (delays) v.push_back(1);
        return v;
    };
    add_structure(n, "empty", make_structure(2, {}, {}), coords(false, false, false), rates(0, 0, 0));
    add_structure(n, "alpha1", make_structure(2, {{0, ell_stop}}, {}), coords(true, false, false), rates(1, 0, 0));
    add_structure(n, "alpha2", make_structure(2, {{1, ell_stop}}, {}), coords(false, true, false), rates(0, 1, 0));
    add_structure(n, "beta", make_structure(2, {{0, ell_stop}, {1, ell_stop}}, {{0, 1}, {1, 0}}), coords(true, true, true), rates(1, 1, 1));
    if (delay1) {
        add_structure(n, "wait1", make_structure(2, {{0, ell_wait}}, {}), coords(true, false, false), rates(0, 0, 0));
        add_structure(n, "wait1_alpha2", make_structure(2, {{0, ell_wait}, {1, ell_stop}}, {}), coords(true, true, false), rates(0, 1, 0));
    }
    if (delay2) {
        add_structure(n, "wait2", make_structure(2, {{1, ell_wait}}, {}), coords(false, true, false), rates(0, 0, 0));
        add_structure(n, "wait2_alpha1", make_structure(2, {{0, ell_stop}, {1, ell_wait}}, {}), coords(true, true, false), rates(1, 0, 0));
    }
    if (delay1 && delay2) add_structure(n, "wait12", make_structure(2, {{0, ell_wait}, {1, ell_wait}}, {}), coords(true, true, false), rates(0, 0, 0));

    for (int i = 0; i < 2; ++i) {
        n.constraints.push_back(freeze(i, ell_stop, {0}));
        if (delays) n.constraints.push_back(freeze(i, ell_wait, {0}));
    }

    if (delay1 && delay2) rule(n, "tau[depart] < T1 and tau[depart] < T2", "wait12");
    if (delay1) {
        rule(n, "tau[depart] < T1 and x[1][0] = 0", "wait1_alpha2");
        rule(n, "tau[depart] < T1", "wait1");
    }
    if (delay2) {
        rule(n, "tau[depart] < T2 and x[0][0] = 0", "wait2_alpha1");
        rule(n, "tau[depart] < T2", "wait2");
    }
    std::string beta = "x[0][0] = 0 and x[1][0] = 0 and (tau[tau] < S or (tau[tau1] < S1 and tau[tau2] < S2)";
    if (osc) beta += " or circ_dist(x[0][1], x[1][1]) > 2*pi*eps";
    beta += ")";
    rule(n, beta, "beta");
    rule(n, "(x[0][0] = 0 and x[1][0] > 0) or (x[0][0] = 0 and x[1][0] <= 0 and tau[tau1] < S1)", "alpha1");
    rule(n, "(x[1][0] = 0 and x[0][0] < 0) or (x[1][0] = 0 and x[0][0] >= 0 and tau[tau2] < S2)", "alpha2");
    n.events.default_target = "empty";

    TerminationSpec term;
    term.targets = {Predicate::parse("x[0][0] = b"), Predicate::parse("x[1][0] = -a")};
    term.initialization = {Predicate::parse("x[0][0] = -a"), Predicate::parse("x[1][0] = b")};
    n.termination = term;

    if (osc) {
        std::string why;
        if (!oscillator_gate_feasible(*osc, &why)) n.metadata["warning"] = why;
    }
    return Network(std::move(n));
}

}  // namespace

Network build_trains(const TrainsParams& p) { return trains_network(p, nullptr, "trains"); }

Network build_trains_oscillators(const TrainsParams& p, const OscillatorParams& q) { return trains_network(p, &q, "trains_oscillators"); }

Network build_trains_zero_threshold(const TrainsParams& p) {
    p.validate();
    if (p.S != 0 || p.S1 != 0 || p.S2 != 0) throw std::invalid_argument("the clock-free trains network needs S = S1 = S2 = 0");
    if (p.T1 != 0 || p.T2 != 0) throw std::invalid_argument("the clock-free trains network has no start delays");
    NetworkSpec n;
    n.name = "trains_zero";
    for (int i = 0; i < 2; ++i) n.nodes.push_back({"T" + std::to_string(i + 1), {Factor::interval(-p.a, p.b)}, 1});
    n.params = {{"a", p.a}, {"b", p.b}};
    const std::string v1 = "(" + p.V1 + ")", v2 = "(" + p.V2 + ")";
    add_structure(n, "empty", make_structure(2, {}, {}), {v1, v2});
    add_structure(n, "alpha1", make_structure(2, {{0, 1}}, {}), {"0", v2});
    add_structure(n, "alpha2", make_structure(2, {{1, 1}}, {}), {v1, "0"});
    n.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    rule(n, "x[0][0] = 0 and x[1][0] > 0", "alpha1");
    rule(n, "x[1][0] = 0 and x[0][0] < 0", "alpha2");
    n.events.default_target = "empty";
    TerminationSpec term;
    term.targets = {Predicate::parse("x[0][0] = b"), Predicate::parse("x[1][0] = -a")};
    n.termination = term;
    return Network(std::move(n));
}

NetworkState trains_initial_state(const Network& net, double x1, double x2) {
    std::vector<double> x(static_cast<std::size_t>(net.dim()), 0.0);
    const auto& L = net.layout();
    x[static_cast<std::size_t>(L.flat_index(0, 0))] = x1;
    x[static_cast<std::size_t>(L.flat_index(1, 0))] = x2;
    return net.make_state(std::move(x));
}

// ---------------------------------------------------------------- Filippov reference

namespace {

enum class FMode { QMP, SlideX2, SlideX1, QPP, QMM, QPM };

const char* fmode_name(FMode m) {
    switch (m) {
        case FMode::QMP: return "Q-+";
        case FMode::SlideX2: return "slide_x2";
        case FMode::SlideX1: return "slide_x1";
        case FMode::QPP: return "Q++";
        case FMode::QMM: return "Q--";
        case FMode::QPM: return "Q+-";
    }
    return "?";
}

FMode classify(const std::array<double, 2>& x) {
    if (x[0] < 0 && x[1] > 0) return FMode::QMP;
    if (x[0] == 0 && x[1] > 0) return FMode::SlideX2;
    if (x[1] == 0 && x[0] < 0) return FMode::SlideX1;
    if (x[0] > 0 && x[1] > 0) return FMode::QPP;
    if (x[0] < 0 && x[1] < 0) return FMode::QMM;
    return FMode::QPM;  // closed fourth quadrant, the origin included
}

struct FilippovSystem {
    Program v1, v2;
    double lo, hi;
    std::array<bool, 2> stopped{false, false};

    std::array<double, 2> field(FMode m, const std::array<double, 2>& x) const {
        double xs[2] = {x[0], x[1]};
        double a = v1.eval(xs, nullptr), b = v2.eval(xs, nullptr);
        std::array<double, 2> f{};
        switch (m) {
            case FMode::QMP: f = {a, b}; break;
            case FMode::SlideX2: f = {0.0, b}; break;
            case FMode::SlideX1: f = {a, 0.0}; break;
            case FMode::QPP: f = {-a, b}; break;
            case FMode::QMM: f = {a, -b}; break;
            case FMode::QPM: f = {a, b}; break;
        }
        for (int i = 0; i < 2; ++i)
            if (stopped[static_cast<std::size_t>(i)]) f[static_cast<std::size_t>(i)] = 0.0;
        return f;
    }

    std::array<double, 2> rk4(FMode m, const std::array<double, 2>& x, double dt) const {
        auto add = [](const std::array<double, 2>& p, const std::array<double, 2>& k, double c) { return std::array<double, 2>{p[0] + c * k[0], p[1] + c * k[1]}; };
        auto k1 = field(m, x);
        auto k2 = field(m, add(x, k1, 0.5 * dt));
        auto k3 = field(m, add(x, k2, 0.5 * dt));
        auto k4 = field(m, add(x, k3, dt));
        return {x[0] + dt * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0, x[1] + dt * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0};
    }

    // Signed guards; an event is a sign change or a landing on zero.
    std::vector<double> guards(FMode m, const std::array<double, 2>& x) const {
        std::vector<double> g;
        switch (m) {
            case FMode::QMP:
            case FMode::QPP:
            case FMode::QMM: g = {x[0], x[1]}; break;
            case FMode::SlideX2: g = {x[1]}; break;
            case FMode::SlideX1: g = {x[0]}; break;
            case FMode::QPM: break;
        }
        for (int i = 0; i < 2; ++i)
            if (!stopped[static_cast<std::size_t>(i)]) {
                g.push_back(x[static_cast<std::size_t>(i)] - lo);
                g.push_back(x[static_cast<std::size_t>(i)] - hi);
            }
        return g;
    }
};

bool crossed(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0.0 && (b[i] == 0.0 || (a[i] < 0) != (b[i] < 0))) return true;
    return false;
}

}  // namespace

FilippovTrajectory filippov_reference(const TrainsParams& p, std::array<double, 2> x, const std::vector<double>& times, double h) {
    p.validate();
    Layout L;
    L.offsets = {0, 1};
    L.dims = {1, 1};
    FilippovSystem sys{Program::compile(Expr::parse(p.V1), L, {}), Program::compile(Expr::parse(p.V2), L, {}), -p.a, p.b};
    FilippovTrajectory out;
    double t = 0.0;
    auto settle = [&]() {
        for (int i = 0; i < 2; ++i) {
            auto& xi = x[static_cast<std::size_t>(i)];
            if (std::fabs(xi) < 1e-12) xi = 0.0;
            if (std::fabs(xi - sys.lo) < 1e-12) xi = sys.lo;
            if (std::fabs(xi - sys.hi) < 1e-12) xi = sys.hi;
        }
        FMode m = classify(x);
        auto f = sys.field(m, x);
        for (int i = 0; i < 2; ++i) {
            auto xi = x[static_cast<std::size_t>(i)];
            if ((xi <= sys.lo && f[static_cast<std::size_t>(i)] < 0) || (xi >= sys.hi && f[static_cast<std::size_t>(i)] > 0)) sys.stopped[static_cast<std::size_t>(i)] = true;
        }
        return classify(x);
    };
    FMode mode = settle();
    for (double target : times) {
        while (t < target) {
            double dt = std::min(h, target - t);
            auto g0 = sys.guards(mode, x);
            auto x1 = sys.rk4(mode, x, dt);
            if (!crossed(g0, sys.guards(mode, x1))) {
                x = x1;
                t += dt;
                if (target - t < 1e-14) t = target;
                continue;
            }
            double lo = 0.0, hi = dt;
            while (hi - lo > 1e-14) {
                double mid = 0.5 * (lo + hi);
                if (crossed(g0, sys.guards(mode, sys.rk4(mode, x, mid))))
                    hi = mid;
                else
                    lo = mid;
            }
            x = sys.rk4(mode, x, hi);
            t += hi;
            mode = settle();
        }
        out.t.push_back(target);
        out.x.push_back(x);
        out.mode.emplace_back(fmode_name(mode));
    }
    return out;
}

FilippovComparison compare_filippov(const TrainsParams& p, std::array<double, 2> x0, double t_end, int points, double tol, double h) {
    TrainsParams zp = p;
    zp.S = zp.S1 = zp.S2 = zp.T1 = zp.T2 = 0.0;
    Network net = build_trains_zero_threshold(zp);
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? 0.0 : t_end * i / (points - 1));
    IntegratorConfig cfg;
    cfg.h = h;
    cfg.t_max = t_end;
    cfg.output_times = grid;
    Trajectory traj = integrate(net, trains_initial_state(net, x0[0], x0[1]), cfg);
    FilippovTrajectory ref = filippov_reference(zp, x0, grid, h);
    FilippovComparison cmp;
    cmp.points = points;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Sample* s = traj.sample_at(grid[i]);
        std::array<double, 2> y{};
        if (s) {
            y = {s->x[0], s->x[1]};
        } else if (traj.status == RunStatus::ReachedTermination && grid[i] > traj.final_state.t) {
            y = {traj.final_state.x[0], traj.final_state.x[1]};
        } else {
            cmp.sup_deviation = std::numeric_limits<double>::infinity();
            cmp.worst_t = grid[i];
            break;
        }
        double d = std::max(std::fabs(y[0] - ref.x[i][0]), std::fabs(y[1] - ref.x[i][1]));
        if (d > cmp.sup_deviation) {
            cmp.sup_deviation = d;
            cmp.worst_t = grid[i];
        }
    }
    cmp.pass = cmp.sup_deviation < tol;
    return cmp;
}

// ---------------------------------------------------------------- combining trains

CombineNetworks build_combine(const CombineParams& p) {
    if (!(p.S1 > 0) || !(p.S2 > 0)) throw std::invalid_argument("combine thresholds S1 and S2 must be positive");
    if (!(p.V1 > 0) || !(p.V2 > 0) || !(p.V12 > 0)) throw std::invalid_argument("combine speeds must be positive");
    NetworkSpec a;
    a.name = "combine_a";
    a.nodes = {{"T1", {Factor::real_line()}, 1}, {"T2", {Factor::real_line()}, 1}};
    a.params = {{"V1", p.V1}, {"V2", p.V2}, {"S1", p.S1}};
    a.clocks = {{"tau", false}};
    add_structure(a, "empty", make_structure(2, {}, {}), {"V1", "V2"}, {0});
    add_structure(a, "alpha1", make_structure(2, {{0, 1}}, {}), {"0", "V2"}, {0});
    add_structure(a, "alpha2", make_structure(2, {{1, 1}}, {}), {"V1", "0"}, {0});
    add_structure(a, "beta", make_structure(2, {{0, 1}, {1, 1}}, {{0, 1}, {1, 0}}), {"0", "0"}, {1});
    a.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    rule(a, "x[0][0] = 0 and x[1][0] = 0 and tau[tau] < S1", "beta");
    rule(a, "x[0][0] = 0", "alpha1");
    rule(a, "x[1][0] = 0", "alpha2");
    a.events.default_target = "empty";
    TerminationSpec ta;
    ta.targets = {Predicate::parse("x[0][0] = 0 and tau[tau] >= S1"), Predicate::parse("x[1][0] = 0")};
    a.termination = ta;

    NetworkSpec b;
    b.name = "combine_b";
    b.nodes = {{"T12", {Factor::real_line()}, 1}};
    b.params = {{"V12", p.V12}, {"S1", p.S1}, {"S2", p.S2}};
    b.clocks = {{"tau", false}};
    add_structure(b, "empty", make_structure(1, {}, {}), {"V12"}, {0});
    add_structure(b, "gamma", make_structure(1, {{0, 1}}, {}), {"0"}, {1});
    b.constraints = {freeze(0, 1, {0})};
    rule(b, "x[0][0] = 0 and tau[tau] < S1 + S2", "gamma");
    b.events.default_target = "empty";
    return {Network(std::move(a)), Network(std::move(b))};
}

NetworkState combine_state(const Network& b, const NetworkState& a_final) {
    NetworkState s = b.make_state({0.0}, {a_final.tau.at(0)}, a_final.t);
    return s;
}

Network build_split(const CombineParams& p) {
    if (!(p.S1 > 0) || !(p.S2 > 0)) throw std::invalid_argument("split thresholds S1 and S2 must be positive");
    NetworkSpec n;
    n.name = "split";
    n.nodes = {{"T1", {Factor::real_line()}, 1}, {"T2", {Factor::real_line()}, 1}};
    n.params = {{"V1", p.V1}, {"V2", p.V2}, {"S1", p.S1}, {"S2", p.S2}};
    n.clocks = {{"tau1", false}, {"tau2", false}};
    add_structure(n, "empty", make_structure(2, {}, {}), {"V1", "V2"}, {0, 0});
    add_structure(n, "alpha1", make_structure(2, {{0, 1}}, {}), {"0", "V2"}, {1, 0});
    add_structure(n, "alpha2", make_structure(2, {{1, 1}}, {}), {"V1", "0"}, {0, 1});
    add_structure(n, "alpha12", make_structure(2, {{0, 1}, {1, 1}}, {}), {"0", "0"}, {1, 1});
    n.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    rule(n, "x[0][0] = 0 and tau[tau1] < S1 and x[1][0] = 0 and tau[tau2] < S2", "alpha12");
    rule(n, "x[0][0] = 0 and tau[tau1] < S1", "alpha1");
    rule(n, "x[1][0] = 0 and tau[tau2] < S2", "alpha2");
    n.events.default_target = "empty";
    return Network(std::move(n));
}

NetworkState split_state(const Network& split, const NetworkState& combined) {
    double x = combined.x.at(0);
    double tau = combined.tau.empty() ? 0.0 : combined.tau[0];
    return split.make_state({x, x}, {tau, tau}, combined.t);
}

CombineRun run_combine(const CombineParams& p, double x1, double x2, const IntegratorConfig& cfg) {
    CombineNetworks nets = build_combine(p);
    CombineRun run;
    run.before = integrate(nets.a, nets.a.make_state({x1, x2}, {0.0}), cfg);
    if (run.before.status != RunStatus::ReachedTermination) return run;
    run.handed_over = true;
    run.handover_t = run.before.final_state.t;
    IntegratorConfig rest = cfg;
    rest.t_max = std::max(0.0, cfg.t_max - run.handover_t);
    run.after = integrate(nets.b, combine_state(nets.b, run.before.final_state), rest);
    int gamma = nets.b.structure_index("gamma");
    for (const auto& e : run.after.events)
        if (e.from == gamma) {
            run.departure_t = e.t;
            break;
        }
    return run;
}

// ---------------------------------------------------------------- small fixtures

Network build_conex(double v1, double v2, double w1, double w2, double k, double eps) {
    NetworkSpec n;
    n.name = "conex";
    for (int i = 0; i < 2; ++i) n.nodes.push_back({"N" + std::to_string(i + 1), {Factor::real_line(), Factor::circle()}, 1});
    n.params = {{"v1", v1}, {"v2", v2}, {"w1", w1}, {"w2", w2}, {"k", k}, {"eps", eps}};
    add_structure(n, "empty", make_structure(2, {}, {}), {"v1", "w1", "v2", "w2"});
    add_structure(n, "alpha1", make_structure(2, {{0, 1}}, {}), {"0", "w1", "v2", "w2"});
    add_structure(n, "alpha2", make_structure(2, {{1, 1}}, {}), {"v1", "w1", "0", "w2"});
    add_structure(n, "beta", make_structure(2, {{0, 1}, {1, 1}}, {{0, 1}, {1, 0}}), {"0", "w1 + k*sin(x[1][1] - x[0][1])", "0", "w2 + k*sin(x[0][1] - x[1][1])"});
    n.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    rule(n, "x[0][0] = 0 and x[1][0] = 0 and circ_dist(x[0][1], x[1][1]) > eps", "beta");
    rule(n, "x[0][0] = 0 and x[1][0] = 0", "empty");
    rule(n, "x[0][0] = 0", "alpha1");
    rule(n, "x[1][0] = 0", "alpha2");
    n.events.default_target = "empty";
    return Network(std::move(n));
}

Network build_collision() {
    NetworkSpec n;
    n.name = "collision";
    n.nodes = {{"N1", {Factor::real_line()}, 1}, {"N2", {Factor::real_line()}, 1}};
    add_structure(n, "empty", make_structure(2, {}, {}), {"1", "-1"});
    add_structure(n, "stop", make_structure(2, {{0, 1}, {1, 1}}, {}), {"0", "0"});
    n.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    rule(n, "x[0][0] = x[1][0]", "stop");
    n.events.default_target = "empty";
    return Network(std::move(n));
}

Network build_amex() {
    NetworkSpec n;
    n.name = "amex";
    n.nodes = {{"N1", {Factor::real_line()}, 1}, {"N2", {Factor::real_line()}, 1}};
    add_structure(n, "e0", make_structure(2, {}, {}), {"1", "-1"});
    add_structure(n, "e1", make_structure(2, {{1, 1}}, {}), {"1", "0"});
    add_structure(n, "e2", make_structure(2, {{0, 1}}, {}), {"0", "-1"});
    n.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    rule(n, "x[1][0] = 0 and x[0][0] < 0", "e1");
    rule(n, "x[0][0] = 0 and x[1][0] > 0", "e2");
    n.events.default_target = "e0";
    return Network(std::move(n));
}

Network build_path_no_sliding() {
    NetworkSpec n;
    n.name = "path";
    n.nodes = {{"N1", {Factor::real_line()}, 0}, {"N2", {Factor::real_line()}, 1}};
    add_structure(n, "s1", make_structure(2, {}, {}), {"1", "-2"});
    add_structure(n, "s2", make_structure(2, {{1, 1}}, {}), {"-1", "0"});
    n.constraints = {freeze(1, 1, {0})};
    rule(n, "x[0][0] <= 0", "s1");
    n.events.default_target = "s2";
    return Network(std::move(n));
}

Network build_spiral_zeno(double c) {
    if (!(c > 0 && c < 1)) throw std::invalid_argument("spiral contraction c must lie in (0, 1)");
    NetworkSpec n;
    n.name = "zeno_spiral";
    n.nodes = {{"X", {Factor::real_line()}, 0}, {"Y", {Factor::real_line()}, 0}};
    n.params = {{"c", c}};
    // Edges only keep the four structures distinct; the fields are constant.
    add_structure(n, "q1", make_structure(2, {}, {}), {"-1", "c"});
    add_structure(n, "q2", make_structure(2, {}, {{1, 0}}), {"-c", "-1"});
    add_structure(n, "q3", make_structure(2, {}, {{0, 1}}), {"1", "-c"});
    add_structure(n, "q4", make_structure(2, {}, {{0, 1}, {1, 0}}), {"c", "1"});
    rule(n, "x[0][0] > 0 and x[1][0] >= 0", "q1");
    rule(n, "x[0][0] <= 0 and x[1][0] > 0", "q2");
    rule(n, "x[0][0] < 0 and x[1][0] <= 0", "q3");
    n.events.default_target = "q4";
    return Network(std::move(n));
}

Network build_struc_indecomp(bool second_map, bool bad_beta, double v1, double v2) {
    NetworkSpec n;
    n.name = second_map ? "strucindecomp_second" : "strucindecomp_first";
    if (bad_beta) n.name += "_bad";
    n.nodes = {{"N1", {Factor::real_line()}, 1}, {"N2", {Factor::real_line()}, 1}};
    n.params = {{"v1", v1}, {"v2", v2}};
    add_structure(n, "empty", make_structure(2, {}, {}), {"v1", "v2"});
    add_structure(n, "alpha1", make_structure(2, {{0, 1}}, {}), {"0", "v2"});
    add_structure(n, "alpha2", make_structure(2, {{1, 1}}, {}), {"v1", "0"});
    add_structure(n, "beta", make_structure(2, {{0, 1}, {1, 1}}, {}), bad_beta ? std::vector<std::string>{"v1", "v2"} : std::vector<std::string>{"0", "0"});
    n.constraints = {freeze(0, 1, {0}), freeze(1, 1, {0})};
    if (second_map) {
        rule(n, "x[0][0] = 0 and x[1][0] = 0", "beta");
        rule(n, "x[0][0] = 0", "alpha1");
        rule(n, "x[1][0] = 0", "alpha2");
    } else {
        rule(n, "x[0][0] < 0 and x[1][0] = 0", "alpha1");
        rule(n, "x[0][0] = 0 and x[1][0] > 0", "alpha2");
        rule(n, "x[0][0] = 0 and x[1][0] = 0", "beta");
    }
    n.events.default_target = "empty";
    return Network(std::move(n));
}

// ---------------------------------------------------------------- power grids

void PowerGridParams::validate() const {
    const std::size_t k = nodes.size();
    if (k == 0) throw std::invalid_argument("power grid needs at least one node");
    auto square = [k](const std::vector<std::vector<double>>& m, const char* what, bool optional) {
        if (optional && m.empty()) return;
        if (m.size() != k) throw std::invalid_argument(std::string(what) + " must be a k x k matrix");
        for (const auto& row : m)
            if (row.size() != k) throw std::invalid_argument(std::string(what) + " must be a k x k matrix");
    };
    square(a, "coupling matrix", false);
    square(phi, "phase shift matrix", true);
    square(T, "trip threshold matrix", true);
    for (const auto& nd : nodes) {
        if (!(nd.D > 0)) throw std::invalid_argument("damping must be positive at node " + nd.name);
        if (nd.second_order && !(nd.M > 0)) throw std::invalid_argument("inertia must be positive at node " + nd.name);
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (a[i][j] < 0) throw std::invalid_argument("coupling magnitudes must be non-negative");
            if (!T.empty() && T[i][j] != T[j][i]) throw std::invalid_argument("trip thresholds must be symmetric");
            if (!T.empty() && i != j && !(T[i][j] > 0)) throw std::invalid_argument("trip thresholds must be positive");
        }
}

Network build_powergrid(const PowerGridParams& p) {
    p.validate();
    const int k = static_cast<int>(p.nodes.size());
    auto lbl = [](int i) { return std::to_string(i + 1); };
    NetworkSpec n;
    n.name = "powergrid";
    for (int i = 0; i < k; ++i) {
        const auto& nd = p.nodes[static_cast<std::size_t>(i)];
        NodeSpec node;
        node.name = nd.name.empty() ? "G" + lbl(i) : nd.name;
        node.factors.push_back(Factor::circle());
        if (nd.second_order) {
            node.factors.push_back(Factor::real_line());
            n.params["inertia_" + lbl(i)] = nd.M;
        }
        n.params["damping_" + lbl(i)] = nd.D;
        n.params["omega_" + lbl(i)] = nd.omega;
        n.nodes.push_back(node);
    }
    auto phi = [&](int i, int j) { return p.phi.empty() ? 0.0 : p.phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    auto aij = [&](int i, int j) { return p.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    struct Line {
        int i, j;
        std::string clock;
    };
    std::vector<Line> lines;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            if (aij(i, j) == 0 && aij(j, i) == 0) continue;
            double T = p.T.empty() ? kPi / 2 : p.T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (T >= kPi / 2) continue;
            std::string tag = lbl(i) + "_" + lbl(j);
            n.params["T_" + tag] = T;
            lines.push_back({i, j, "trip_" + tag});
        }
    if (lines.size() > 10) throw std::invalid_argument("at most 10 trippable lines are supported (2^L structures)");
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (aij(i, j) != 0) {
                n.params["a_" + lbl(i) + "_" + lbl(j)] = aij(i, j);
                if (phi(i, j) != 0) n.params["phi_" + lbl(i) + "_" + lbl(j)] = phi(i, j);
            }
    if (p.latched)
        for (const auto& l : lines) n.clocks.push_back({l.clock, false});

    const unsigned count = 1u << lines.size();
    for (unsigned mask = 0; mask < count; ++mask) {
        auto tripped = [&](int i, int j) {
            for (std::size_t l = 0; l < lines.size(); ++l)
                if ((mask >> l & 1u) && ((lines[l].i == i && lines[l].j == j) || (lines[l].i == j && lines[l].j == i))) return true;
            return false;
        };
        std::string name = mask == 0 ? "intact" : "trip";
        for (std::size_t l = 0; l < lines.size(); ++l)
            if (mask >> l & 1u) name += (name == "trip" ? "_" : "+") + lbl(lines[l].i) + "-" + lbl(lines[l].j);
        ConnectionStructure st(k);
        std::vector<std::string> coords;
        for (int i = 0; i < k; ++i) {
            std::string sum = "omega_" + lbl(i);
            if (aij(i, i) != 0 && phi(i, i) != 0) sum += " + a_" + lbl(i) + "_" + lbl(i) + "*sin(phi_" + lbl(i) + "_" + lbl(i) + ")";
            for (int j = 0; j < k; ++j) {
                if (j == i || aij(i, j) == 0 || tripped(i, j)) continue;
                st.set_edge(i, j);
                std::string arg = "x[" + std::to_string(j) + "][0] - x[" + std::to_string(i) + "][0]";
                if (phi(i, j) != 0) arg += " + phi_" + lbl(i) + "_" + lbl(j);
                sum += " + a_" + lbl(i) + "_" + lbl(j) + "*sin(" + arg + ")";
            }
            if (p.nodes[static_cast<std::size_t>(i)].second_order) {
                coords.push_back("x[" + std::to_string(i) + "][1]");
                coords.push_back("(" + sum + " - damping_" + lbl(i) + "*x[" + std::to_string(i) + "][1]) / inertia_" + lbl(i));
            } else {
                coords.push_back("(" + sum + ") / damping_" + lbl(i));
            }
        }
        std::vector<int> rates;
        if (p.latched)
            for (std::size_t l = 0; l < lines.size(); ++l) rates.push_back(static_cast<int>(mask >> l & 1u));
        add_structure(n, name, st, coords, rates);
    }
    auto cond = [&](const Line& l) {
        std::string c = "circ_dist(x[" + std::to_string(l.i) + "][0], x[" + std::to_string(l.j) + "][0]) > T_" + lbl(l.i) + "_" + lbl(l.j);
        if (p.latched) c = "(" + c + " or tau[" + l.clock + "] > 0)";
        return c;
    };
    for (unsigned mask = 1; mask < count; ++mask) {
        std::string when;
        for (std::size_t l = 0; l < lines.size(); ++l) {
            if (!when.empty()) when += " and ";
            when += (mask >> l & 1u) ? cond(lines[l]) : "not " + cond(lines[l]);
        }
        rule(n, when, n.structure_names[mask]);
    }
    n.events.default_target = "intact";
    return Network(std::move(n));
}

PowerGridParams two_node_grid(double P, double k, double damping, double T12) {
    PowerGridParams p;
    p.nodes = {{"G1", true, 1.0, damping, P}, {"G2", true, 1.0, damping, -P}};
    p.a = {{0.0, k}, {k, 0.0}};
    p.T = {{kPi / 2, T12}, {T12, kPi / 2}};
    return p;
}

PowerGridParams first_order_ring(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("ring needs at least two nodes");
    Rng rng(seed);
    PowerGridParams p;
    for (int i = 0; i < n; ++i) p.nodes.push_back({"D" + std::to_string(i + 1), false, 0.0, 0.5 + 1.5 * uniform01(rng), 2.0 * uniform01(rng) - 1.0});
    p.a.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    auto link = [&](int i, int j) {
        double w = 0.5 + uniform01(rng);
        p.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = w;
        p.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = w;
    };
    for (int i = 0; i < n; ++i) link(i, (i + 1) % n);
    if (n > 3) link(0, n / 2);
    return p;
}

// ---------------------------------------------------------------- microgrid

void MicrogridParams::validate() const {
    if (!(B_M > 0)) throw std::invalid_argument("battery capacity must be positive");
    if (!(B_low >= 0 && B_low < B_high && B_high <= B_M)) throw std::invalid_argument("need 0 <= B_low < B_high <= B_M");
    for (double m : {m_hi, m_lo, m_big, m_export, f_stress})
        if (!(m > 0)) throw std::invalid_argument("hysteresis bands and margins must be positive");
    if (!(r_ch > 0 && p_dis > 0 && r_grid > 0)) throw std::invalid_argument("charge and discharge rates must be positive");
}

Network build_microgrid(const MicrogridParams& p) {
    p.validate();
    NetworkSpec n;
    n.name = "microgrid";
    n.nodes = {{"battery", {Factor::interval(0.0, p.B_M)}, 0}, {"generation", {Factor::real_line(), Factor::real_line()}, 0}, {"grid", {Factor::real_line()}, 0}};
    n.params = {{"B_M", p.B_M}, {"B_low", p.B_low}, {"B_high", p.B_high}, {"r_ch", p.r_ch}, {"p_dis", p.p_dis}, {"r_grid", p.r_grid},
                {"A_O", p.A_O}, {"w_O", p.w_O}, {"A_L", p.A_L}, {"w_L", p.w_L}, {"m_hi", p.m_hi}, {"m_lo", p.m_lo},
                {"m_big", p.m_big}, {"m_export", p.m_export}, {"k_f", p.k_f}, {"c_f", p.c_f}, {"f_stress", p.f_stress}};
    n.clocks = {{"time", false}};
    const std::string dO = "A_O*w_O*cos(w_O*tau[time])", dL = "A_L*w_L*cos(w_L*tau[time])";
    const std::string relax = "-k_f*x[2][0]";
    // battery = 0, generation = 1, grid = 2
    auto add = [&](const std::string& name, std::vector<std::pair<int, int>> edges, const std::string& dB, const std::string& df) {
        add_structure(n, name, make_structure(3, {}, edges), {dB, dO, dL, df}, {1});
    };
    add("islanded", {}, "0", relax);
    add("alpha", {{0, 1}}, "r_ch*(x[1][0] - x[1][1])", relax);
    add("beta", {{1, 0}}, "-p_dis", relax);
    add("gc1", {{2, 1}}, "0", relax + " + c_f*(x[1][0] - x[1][1])");
    add("gc2", {{2, 0}}, "-p_dis", relax);
    add("gc3", {{1, 0}, {1, 2}}, "-p_dis", relax);
    add("gc4", {{1, 2}}, "0", relax);
    add("gc5", {{0, 2}}, "r_grid", relax);
    const std::string d = "(x[1][0] - x[1][1])";
    rule(n, "x[0][0] <= B_low and " + d + " < 0", "gc4");
    rule(n, d + " > m_hi and x[0][0] < B_M", "alpha");
    rule(n, d + " < -m_big and x[0][0] > B_low", "gc3");
    rule(n, d + " < -m_lo and x[0][0] > B_low", "beta");
    rule(n, "x[2][0] < -f_stress and x[0][0] > B_high", "gc2");
    rule(n, d + " > m_export and x[0][0] >= B_M", "gc1");
    rule(n, "x[2][0] > f_stress and x[0][0] < B_high", "gc5");
    n.events.default_target = "islanded";
    n.metadata["O0"] = num(p.O0);
    n.metadata["L0"] = num(p.L0);
    return Network(std::move(n));
}

// ---------------------------------------------------------------- presets

Network build_blinking_pair(double omega1, double omega2, double k) {
    AdditiveNetworkSpec spec;
    spec.name = "blinking_pair";
    spec.nodes = {{"O1", {Factor::circle()}, 0}, {"O2", {Factor::circle()}, 0}};
    spec.params = {{"omega1", omega1}, {"omega2", omega2}, {"k", k}};
    spec.intrinsic = {{Expr::parse("omega1")}, {Expr::parse("omega2")}};
    spec.coupling[{0, 1}] = {Expr::parse("k*sin(x[1][0] - x[0][0])")};
    spec.coupling[{1, 0}] = {Expr::parse("k*sin(x[0][0] - x[1][0])")};
    spec.gamma = make_structure(2, {}, {{0, 1}, {1, 0}});
    // Coupling drops while the phases are more than a quarter turn apart.
    spec.params["range"] = std::numbers::pi / 2.0;
    EventMapSpec ev;
    ev.rules.push_back({Predicate::parse("circ_dist(x[0][0], x[1][0]) > range"), "empty"});
    ev.default_target = "coupled";
    return asynchronize_additive(spec, {{"coupled", spec.gamma}, {"empty", ConnectionStructure(2)}}, ev);
}

namespace {

double get(const std::map<std::string, double>& m, const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) throw std::invalid_argument("missing preset parameter '" + k + "'");
    return it->second;
}

TrainsParams trains_from(const std::map<std::string, double>& m) {
    TrainsParams p;
    p.S = 0.0;
    p.a = get(m, "a");
    p.b = get(m, "b");
    p.V1 = num(get(m, "v1"));
    p.V2 = num(get(m, "v2"));
    if (m.count("S")) p.S = get(m, "S");
    if (m.count("S1")) p.S1 = get(m, "S1");
    if (m.count("S2")) p.S2 = get(m, "S2");
    if (m.count("T1")) p.T1 = get(m, "T1");
    if (m.count("T2")) p.T2 = get(m, "T2");
    return p;
}

CombineParams combine_from(const std::map<std::string, double>& m) {
    return {get(m, "V1"), get(m, "V2"), get(m, "V12"), get(m, "S1"), get(m, "S2")};
}

MicrogridParams microgrid_from(const std::map<std::string, double>& m) {
    MicrogridParams p;
    p.B_M = get(m, "B_M");
    p.B_low = get(m, "B_low");
    p.B_high = get(m, "B_high");
    p.r_ch = get(m, "r_ch");
    p.p_dis = get(m, "p_dis");
    p.r_grid = get(m, "r_grid");
    p.O0 = get(m, "O0");
    p.A_O = get(m, "A_O");
    p.w_O = get(m, "w_O");
    p.L0 = get(m, "L0");
    p.A_L = get(m, "A_L");
    p.w_L = get(m, "w_L");
    p.m_hi = get(m, "m_hi");
    p.m_lo = get(m, "m_lo");
    p.m_big = get(m, "m_big");
    p.m_export = get(m, "m_export");
    p.k_f = get(m, "k_f");
    p.c_f = get(m, "c_f");
    p.f_stress = get(m, "f_stress");
    return p;
}

IntegratorConfig cfg_with(double t_max, double h = 1e-3) {
    IntegratorConfig c;
    c.t_max = t_max;
    c.h = h;
    return c;
}

std::vector<Preset> make_presets() {
    std::vector<Preset> out;
    const std::map<std::string, double> trains_defaults = {{"a", 1}, {"b", 1}, {"v1", 1}, {"v2", -1}, {"S", 1}, {"S1", 0}, {"S2", 0}, {"T1", 0}, {"T2", 0}};
    auto trains_init = [](const Network& net, const std::map<std::string, double>& m) { return trains_initial_state(net, -get(m, "a"), get(m, "b")); };

    out.push_back({"trains", "two trains on a single track with a passing loop, clocks tau1, tau2, tau", trains_defaults,
                   [](const auto& m) { return build_trains(trains_from(m)); }, trains_init, cfg_with(10.0)});

    auto osc_defaults = trains_defaults;
    osc_defaults.insert({{"omega1", 1}, {"omega2", 1}, {"kc", 0.5}, {"eps", 0.1}, {"theta1", 0.2}, {"theta2", 0.0}});
    out.push_back({"trains_oscillators", "trains whose drivers phase-synchronize oscillators before leaving the loop (theta in turns)", osc_defaults,
                   [](const auto& m) {
                       return build_trains_oscillators(trains_from(m), OscillatorParams{get(m, "omega1"), get(m, "omega2"), get(m, "kc"), get(m, "eps")});
                   },
                   [](const Network& net, const auto& m) {
                       NetworkState s = trains_initial_state(net, -get(m, "a"), get(m, "b"));
                       s.x[1] = 2 * kPi * get(m, "theta1");
                       s.x[3] = 2 * kPi * get(m, "theta2");
                       return s;
                   },
                   cfg_with(20.0)});

    out.push_back({"trains_zero", "clock-free trains network for zero thresholds", {{"a", 1}, {"b", 1}, {"v1", 1}, {"v2", -1}},
                   [](const auto& m) { return build_trains_zero_threshold(trains_from(m)); }, trains_init, cfg_with(5.0)});

    out.push_back({"trains_product", "product of two independent trains networks on separate lines",
                   {{"a", 1}, {"b", 1}, {"v1", 1}, {"v2", -1}, {"S", 1}, {"S1", 0}, {"S2", 0}, {"a_2", 2}, {"b_2", 1}, {"v1_2", 1}, {"v2_2", -0.5}, {"S_2", 0.5}, {"S1_2", 0.25}, {"S2_2", 0}},
                   [](const auto& m) {
                       std::map<std::string, double> second = {{"a", get(m, "a_2")}, {"b", get(m, "b_2")}, {"v1", get(m, "v1_2")}, {"v2", get(m, "v2_2")}, {"S", get(m, "S_2")}, {"S1", get(m, "S1_2")}, {"S2", get(m, "S2_2")}};
                       NetworkSpec sb = build_trains(trains_from(second)).spec();
                       for (auto& nd : sb.nodes) nd.name += "b";
                       std::map<std::string, std::string> ren;
                       for (auto& c : sb.clocks) {
                           ren[c.name] = c.name + "_b";
                           c.name += "_b";
                       }
                       auto rc = [&](const Expr& e) { return e.rename_clocks(ren); };
                       for (auto& [name, f] : sb.fields)
                           for (auto& e : f.coords) e = rc(e);
                       for (auto& r : sb.events.rules) r.when = r.when.transform_exprs(rc);
                       sb.name = "trains_b";
                       return product(build_trains(trains_from(m)), Network(std::move(sb)));
                   },
                   [](const Network& net, const auto& m) {
                       std::vector<double> x = {-get(m, "a"), get(m, "b"), -get(m, "a_2"), get(m, "b_2")};
                       return net.make_state(x);
                   },
                   cfg_with(10.0)});

    const std::map<std::string, double> combine_defaults = {{"V1", 1}, {"V2", 1}, {"V12", 1}, {"S1", 0.5}, {"S2", 0.5}, {"x1", -1}, {"x2", -2}};
    out.push_back({"combine_a", "two trains meeting at the loop before coupling (hands over when tau reaches S1)", combine_defaults,
                   [](const auto& m) { return build_combine(combine_from(m)).a; },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "x2")}, {0.0}); }, cfg_with(10.0)});
    out.push_back({"combine_b", "the combined train waiting S2 at the loop, then leaving", combine_defaults,
                   [](const auto& m) { return build_combine(combine_from(m)).b; },
                   [](const Network& net, const auto& m) { return net.make_state({0.0}, {get(m, "S1")}); }, cfg_with(5.0)});
    out.push_back({"split", "one train splitting into two, the clock duplicated", combine_defaults,
                   [](const auto& m) { return build_split(combine_from(m)); },
                   [](const Network& net, const auto&) { return net.make_state({0.0, 0.0}, {0.0, 0.0}); }, cfg_with(5.0)});

    out.push_back({"conex", "two nodes on R x T that stop at 0 and release once phase-synchronized",
                   {{"v1", 1}, {"v2", 1}, {"w1", 1}, {"w2", 1.05}, {"k", 1}, {"eps", 0.05}, {"x1", -1}, {"x2", -2}, {"theta1", 0}, {"theta2", 2}},
                   [](const auto& m) { return build_conex(get(m, "v1"), get(m, "v2"), get(m, "w1"), get(m, "w2"), get(m, "k"), get(m, "eps")); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "theta1"), get(m, "x2"), get(m, "theta2")}); }, cfg_with(20.0)});
    out.push_back({"collision", "dynamics stop on the diagonal", {{"x1", -1}, {"x2", 1}}, [](const auto&) { return build_collision(); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "x2")}); }, cfg_with(3.0)});
    out.push_back({"amex", "half-open event sets on the axes; discontinuous semiflow", {{"x1", -2}, {"x2", 1}}, [](const auto&) { return build_amex(); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "x2")}); }, cfg_with(4.0)});
    out.push_back({"path", "two half planes with opposing fields and no sliding structure", {{"x1", -1}, {"x2", 0}},
                   [](const auto&) { return build_path_no_sliding(); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "x2")}); }, cfg_with(3.0)});
    out.push_back({"zeno_spiral", "piecewise-constant spiral with geometrically shrinking switching times", {{"c", 0.9}, {"x1", 1}, {"x2", 0}},
                   [](const auto& m) { return build_spiral_zeno(get(m, "c")); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "x2")}); }, cfg_with(20.0)});
    // The non-admissible variant (f_beta = (v1, v2)) ships as a scenario file instead.
    for (int variant = 0; variant < 2; ++variant) {
        static const char* names[] = {"strucindecomp_first", "strucindecomp_second"};
        static const char* desc[] = {"disconnected graph, event map coupling the nodes", "separable event map with f_beta = (0, 0)"};
        out.push_back({names[variant], desc[variant], {{"v1", 1}, {"v2", 1}, {"x1", -1}, {"x2", -2}},
                       [variant](const auto& m) { return build_struc_indecomp(variant != 0, false, get(m, "v1"), get(m, "v2")); },
                       [](const Network& net, const auto& m) { return net.make_state({get(m, "x1"), get(m, "x2")}); }, cfg_with(4.0)});
    }
    out.push_back({"powergrid", "two second-order phase oscillators with a trippable line (latched=1 keeps trips)",
                   {{"P", 0.5}, {"k", 1}, {"damping", 1}, {"T12", kPi / 2}, {"latched", 1}},
                   [](const auto& m) {
                       PowerGridParams p = two_node_grid(get(m, "P"), get(m, "k"), get(m, "damping"), get(m, "T12"));
                       p.latched = get(m, "latched") != 0;
                       return build_powergrid(p);
                   },
                   [](const Network& net, const auto&) { return net.make_state(std::vector<double>(static_cast<std::size_t>(net.dim()), 0.0)); }, cfg_with(50.0)});
    out.push_back({"powergrid_ring", "first-order droop/load ring with chords, no trips", {{"n", 5}, {"seed", 1}},
                   [](const auto& m) { return build_powergrid(first_order_ring(static_cast<int>(get(m, "n")), static_cast<std::uint64_t>(get(m, "seed")))); },
                   [](const Network& net, const auto&) { return net.make_state(std::vector<double>(static_cast<std::size_t>(net.dim()), 0.0)); }, cfg_with(20.0)});
    MicrogridParams mp;
    out.push_back({"microgrid", "battery, generation and main-grid supervisory switching",
                   {{"B_M", mp.B_M}, {"B_low", mp.B_low}, {"B_high", mp.B_high}, {"r_ch", mp.r_ch}, {"p_dis", mp.p_dis}, {"r_grid", mp.r_grid},
                    {"O0", mp.O0}, {"A_O", mp.A_O}, {"w_O", mp.w_O}, {"L0", mp.L0}, {"A_L", mp.A_L}, {"w_L", mp.w_L},
                    {"m_hi", mp.m_hi}, {"m_lo", mp.m_lo}, {"m_big", mp.m_big}, {"m_export", mp.m_export},
                    {"k_f", mp.k_f}, {"c_f", mp.c_f}, {"f_stress", mp.f_stress}, {"B0", 0}, {"f0", 0}},
                   [](const auto& m) { return build_microgrid(microgrid_from(m)); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "B0"), get(m, "O0"), get(m, "L0"), get(m, "f0")}, {0.0}); },
                   cfg_with(20.0)});
    out.push_back({"blinking_pair", "two phase oscillators whose coupling is switched on and off (for stochastic runs)",
                   {{"omega1", 1.0}, {"omega2", 1.5}, {"k", 1.0}, {"theta1", 0.0}, {"theta2", 1.0}},
                   [](const auto& m) { return build_blinking_pair(get(m, "omega1"), get(m, "omega2"), get(m, "k")); },
                   [](const Network& net, const auto& m) { return net.make_state({get(m, "theta1"), get(m, "theta2")}); }, cfg_with(10.0)});
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = make_presets();
    return all;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

std::map<std::string, double> preset_params(const Preset& p, const std::map<std::string, double>& overrides) {
    std::map<std::string, double> out = p.defaults;
    for (const auto& [k, v] : overrides) {
        if (!out.count(k)) throw std::invalid_argument("preset '" + p.name + "' has no parameter '" + k + "'");
        out[k] = v;
    }
    return out;
}

}  // namespace asynet
