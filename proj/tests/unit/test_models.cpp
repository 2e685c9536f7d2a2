#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "asynet/algebra.hpp"
#include "asynet/checks.hpp"
#include "asynet/models.hpp"

using namespace asynet;
using Catch::Approx;

namespace {

struct Arrivals {
    double t1 = -1, t2 = -1;
};

// Arrival of each train at the far end, read off the boundary events.
Arrivals simulate(const TrainsParams& p) {
    Network net = build_trains(p);
    IntegratorConfig cfg;
    cfg.t_max = 50;
    Trajectory tr = integrate(net, trains_initial_state(net, -p.a, p.b), cfg);
    Arrivals out;
    for (const auto& e : tr.events) {
        if (e.cause != EventCause::Boundary) continue;
        if (e.node == 0 && out.t1 < 0) out.t1 = e.t;
        if (e.node == 1 && out.t2 < 0) out.t2 = e.t;
    }
    // the last arrival ends the run and may not appear as a separate event
    if (tr.status == RunStatus::ReachedTermination) {
        if (out.t1 < 0) out.t1 = tr.final_state.t;
        if (out.t2 < 0) out.t2 = tr.final_state.t;
    }
    return out;
}

// Unit speeds. Both trains reach the loop, wait until the shared timer and
// one private timer have run out, then each leaves once its own timer has.
Arrivals closed_form(double a, double b, double S, double S1, double S2) {
    double t1 = a, t2 = b, tl = std::max(t1, t2);
    double tb = std::max({tl + S, std::min(t1 + S1, t2 + S2), tl});
    double d1 = std::max(tb, t1 + S1), d2 = std::max(tb, t2 + S2);
    return {d1 + b, d2 + a};
}

}  // namespace

TEST_CASE("trains schedule matches the closed form") {
    struct Row {
        double a, b, S, S1, S2;
    };
    std::vector<Row> rows = {{1, 1, 1, 0, 0}, {1, 1, 0.5, 2, 0.2}, {1, 2, 0.3, 0.5, 0.4}, {2, 1, 0, 0.7, 0.1}, {1.5, 0.5, 0.25, 0, 3}};
    Rng rng(9);
    for (int k = 0; k < 10; ++k)
        rows.push_back({0.2 + 2 * uniform01(rng), 0.2 + 2 * uniform01(rng), 2 * uniform01(rng), 2 * uniform01(rng), 2 * uniform01(rng)});
    for (const auto& r : rows) {
        TrainsParams p;
        p.a = r.a;
        p.b = r.b;
        p.S = r.S;
        p.S1 = r.S1;
        p.S2 = r.S2;
        Arrivals want = closed_form(r.a, r.b, r.S, r.S1, r.S2);
        Arrivals got = simulate(p);
        INFO("a=" << r.a << " b=" << r.b << " S=" << r.S << " S1=" << r.S1 << " S2=" << r.S2);
        CHECK(got.t1 == Approx(want.t1).margin(1e-6));
        CHECK(got.t2 == Approx(want.t2).margin(1e-6));
    }
}

TEST_CASE("hand-checked schedules") {
    Arrivals a = closed_form(1, 1, 0.5, 2, 0.2);
    CHECK(a.t1 == Approx(4.0));
    CHECK(a.t2 == Approx(2.5));
    Arrivals b = closed_form(1, 2, 0.3, 0.5, 0.4);
    CHECK(b.t1 == Approx(4.3));
    CHECK(b.t2 == Approx(3.4));
}

TEST_CASE("trains parameters are validated") {
    TrainsParams p;
    p.S = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TrainsParams{};
    p.a = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("oscillator gate feasibility") {
    OscillatorParams q;
    q.omega1 = 1.0;
    q.omega2 = 1.0;
    CHECK(oscillator_gate_feasible(q));
    q.omega2 = 1.0 + 2 * M_PI * 2 * q.kc;  // gap beyond the locking range
    std::string why;
    CHECK_FALSE(oscillator_gate_feasible(q, &why));
    CHECK_FALSE(why.empty());
    Network net = build_trains_oscillators(TrainsParams{}, q);
    CHECK(net.spec().metadata.count("warning") == 1);
}

TEST_CASE("zero-threshold network agrees with the clocked one at S = 0") {
    TrainsParams p;
    p.S = 0;
    Network z = build_trains_zero_threshold(p);
    Network c = build_trains(p);
    IntegratorConfig cfg;
    cfg.output_times = {0.5, 1.0, 1.5, 2.0};
    Trajectory tz = integrate(z, trains_initial_state(z, -1, 1), cfg);
    Trajectory tc = integrate(c, trains_initial_state(c, -1, 1), cfg);
    for (double t : cfg.output_times) {
        REQUIRE(tz.sample_at(t));
        REQUIRE(tc.sample_at(t));
        CHECK(tz.sample_at(t)->x == tc.sample_at(t)->x);
    }
    TrainsParams q;
    q.S = 0.5;
    CHECK_THROWS_AS(build_trains_zero_threshold(q), std::invalid_argument);
}

TEST_CASE("combining trains hands over and departs") {
    CombineParams p;
    IntegratorConfig cfg;
    CombineRun r = run_combine(p, -1, -2, cfg);
    REQUIRE(r.handed_over);
    CHECK(r.handover_t == Approx(2.5).margin(1e-6));
    CHECK(r.departure_t == Approx(3.0).margin(1e-6));
}

TEST_CASE("filippov comparison") {
    TrainsParams p;
    p.S = 0;
    FilippovComparison c = compare_filippov(p, {-0.5, 0.6});
    CHECK(c.pass);
    CHECK(c.sup_deviation < 1e-6);
}

TEST_CASE("power grid presets validate") {
    CHECK(validate_network(build_powergrid(two_node_grid())).empty());
    CHECK(validate_network(build_powergrid(first_order_ring(5, 1))).empty());
    PowerGridParams bad = two_node_grid();
    bad.a.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("microgrid validates and keeps storage in range") {
    MicrogridParams p;
    Network net = build_microgrid(p);
    CHECK(validate_network(net).empty());
    MicrogridParams q;
    q.B_low = 9;
    q.B_high = 2;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("every preset builds, validates and runs") {
    for (const auto& pr : presets()) {
        INFO(pr.name);
        auto params = preset_params(pr, {});
        Network net = pr.build(params);
        CHECK(validate_network(net).empty());
        NetworkState x0 = pr.initial(net, params);
        IntegratorConfig cfg = pr.config;
        cfg.t_max = std::min(cfg.t_max, 2.0);
        CHECK_NOTHROW(integrate(net, x0, cfg));
    }
    CHECK(find_preset("no such preset") == nullptr);
    CHECK_THROWS_AS(preset_params(*find_preset("trains"), {{"bogus", 1.0}}), std::invalid_argument);
}
