#include <catch_amalgamated.hpp>

#include <cmath>

#include "asynet/integrator.hpp"
#include "asynet/models.hpp"

using namespace asynet;
using Catch::Approx;

namespace {

// Node 0 runs at speed 2 until x reaches 1, then at speed 0.5. The slow
// structure also listens to the idle node 1 so the two structures differ.
Network bouncer() {
    NetworkSpec n;
    n.name = "bouncer";
    n.nodes = {{"N", {Factor::real_line()}, 0}, {"M", {Factor::real_line()}, 0}};
    n.structure_names = {"up", "down"};
    ConnectionStructure listen(2);
    listen.set_edge(0, 1);
    n.structures = {ConnectionStructure(2), listen};
    n.clocks = {{"c", false}};
    n.fields["up"] = {{Expr::parse("2"), Expr(0.0)}, {1}};
    n.fields["down"] = {{Expr::parse("0.5"), Expr(0.0)}, {0}};
    n.events.rules = {{Predicate::parse("x[0][0] >= 1"), "down"}};
    n.events.default_target = "up";
    return Network(n);
}

}  // namespace

TEST_CASE("config validation") {
    IntegratorConfig c;
    CHECK_NOTHROW(c.validate());
    c.h = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = IntegratorConfig{};
    c.t_max = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("guard crossing is located to the bisection tolerance") {
    Network net = bouncer();
    IntegratorConfig cfg;
    cfg.t_max = 2.0;
    Trajectory tr = integrate(net, net.make_state({0.0, 0.0}), cfg);
    REQUIRE(tr.ok());
    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].t == Approx(0.5).margin(1e-9));
    CHECK(net.structure_name(tr.events[0].to) == "down");
    // the clock runs only under "up"
    CHECK(tr.final_state.tau[0] == Approx(0.5).margin(1e-9));
    CHECK(tr.final_state.x[0] == Approx(1.75).margin(1e-9));
}

TEST_CASE("output times are hit exactly") {
    Network net = bouncer();
    IntegratorConfig cfg;
    cfg.t_max = 0.4;
    cfg.h = 0.003;
    cfg.output_times = {0.1, 0.2, 0.4};
    Trajectory tr = integrate(net, net.make_state({0.0, 0.0}), cfg);
    for (double t : cfg.output_times) {
        const Sample* s = tr.sample_at(t);
        REQUIRE(s != nullptr);
        CHECK(s->x[0] == Approx(2 * t).margin(1e-12));
    }
}

TEST_CASE("step times do not drift") {
    Network net = bouncer();
    IntegratorConfig cfg;
    cfg.t_max = 0.4;
    cfg.stride = 1;
    Trajectory tr = integrate(net, net.make_state({-10.0, 0.0}), cfg);
    CHECK(tr.final_state.t == 0.4);
    CHECK(tr.samples[10].t == 0.01);
}

TEST_CASE("flow under a fixed structure matches the closed form") {
    Network net = build_powergrid(two_node_grid(0.0, 0.0, 1.0));
    IntegratorConfig cfg;
    NetworkState s = net.make_state({0.0, 1.0, 0.0, -1.0});
    NetworkState out = flow_under_alpha(net, 0, s, 2.0, cfg);
    // decoupled, damping 1, no injection: omega = omega0 e^-t
    CHECK(out.x[1] == Approx(std::exp(-2.0)).margin(1e-10));
    CHECK(out.x[0] == Approx(1.0 - std::exp(-2.0)).margin(1e-10));
}

TEST_CASE("trains wait at the loop and terminate on arrival") {
    TrainsParams p;
    Network net = build_trains(p);
    IntegratorConfig cfg;
    Trajectory tr = integrate(net, trains_initial_state(net, -1, 1), cfg);
    CHECK(tr.status == RunStatus::ReachedTermination);
    CHECK(tr.final_state.t == Approx(3.0).margin(1e-6));
    CHECK(tr.final_state.x[0] == 1.0);
    CHECK(tr.final_state.x[1] == -1.0);
}

TEST_CASE("a coordinate reaching its interval end stops there") {
    TrainsParams p;
    p.b = 2;
    p.S = 0;
    Network net = build_trains(p);
    IntegratorConfig cfg;
    Trajectory tr = integrate(net, trains_initial_state(net, -1, 2), cfg);
    bool saw_boundary = false;
    for (const auto& e : tr.events) saw_boundary |= e.cause == EventCause::Boundary && e.node == 1 && std::fabs(e.t - 3.0) < 1e-6;
    CHECK(saw_boundary);
    CHECK(tr.final_state.x[1] == -1.0);
}

TEST_CASE("accumulating switching times raise ZenoDetected") {
    Network net = build_spiral_zeno(0.9);
    IntegratorConfig cfg;
    cfg.t_max = 20;
    Trajectory tr = integrate(net, net.make_state({1.0, 0.0}), cfg);
    CHECK(tr.status == RunStatus::Error);
    CHECK(tr.error == RunError::Zeno);
    // accumulation point of 1 + 0.9 + 0.81 + ... = 10
    CHECK(tr.final_state.t < 10.0);
    CHECK(tr.final_state.t > 9.9);
}

TEST_CASE("opposing fields without a sliding structure raise NoContinuation") {
    Network net = build_path_no_sliding();
    IntegratorConfig cfg;
    cfg.t_max = 3;
    Trajectory tr = integrate(net, net.make_state({-1.0, 0.0}), cfg);
    CHECK(tr.error == RunError::NoContinuation);
}

TEST_CASE("max_events is enforced") {
    Network net = build_spiral_zeno(0.9);
    IntegratorConfig cfg;
    cfg.t_max = 20;
    cfg.max_events = 3;
    Trajectory tr = integrate(net, net.make_state({1.0, 0.0}), cfg);
    CHECK(tr.error == RunError::MaxEvents);
}

TEST_CASE("stochastic runs are reproducible per seed") {
    Network net = build_blinking_pair(1.0, 1.5, 1.0);
    IntegratorConfig cfg;
    cfg.t_max = 10;
    cfg.seed = 3;
    auto sampler = uniform_other_sampler(net);
    Trajectory a = integrate_stochastic(net, 2.0, sampler, net.make_state({0.0, 1.0}), cfg);
    Trajectory b = integrate_stochastic(net, 2.0, sampler, net.make_state({0.0, 1.0}), cfg);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) CHECK(a.events[k].t == b.events[k].t);
    CHECK(a.final_state.x == b.final_state.x);
    cfg.seed = 4;
    Trajectory c = integrate_stochastic(net, 2.0, sampler, net.make_state({0.0, 1.0}), cfg);
    CHECK((c.events.size() != a.events.size() || c.final_state.x != a.final_state.x));
}

TEST_CASE("circle coordinates stay in [0, 2 pi)") {
    Network net = build_blinking_pair(3.0, 3.0, 0.0);
    IntegratorConfig cfg;
    cfg.t_max = 10;
    cfg.stride = 1;
    Trajectory tr = integrate(net, net.make_state({0.0, 1.0}), cfg);
    for (const auto& s : tr.samples)
        for (double v : s.x) {
            CHECK(v >= 0.0);
            CHECK(v < 2 * M_PI);
        }
}
