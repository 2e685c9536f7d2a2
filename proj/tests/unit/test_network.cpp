#include <catch_amalgamated.hpp>

#include "asynet/checks.hpp"
#include "asynet/models.hpp"
#include "asynet/network.hpp"

using namespace asynet;

namespace {

// Two real nodes; "stop" freezes node 0.
NetworkSpec tiny() {
    NetworkSpec n;
    n.name = "tiny";
    n.nodes = {{"A", {Factor::real_line()}, 1}, {"B", {Factor::real_line()}, 0}};
    n.structure_names = {"free", "stop"};
    ConnectionStructure stop(2);
    stop.set_constraint(0, 1);
    n.structures = {ConnectionStructure(2), stop};
    n.fields["free"] = {{Expr::parse("1"), Expr::parse("-1")}, {}};
    n.fields["stop"] = {{Expr::parse("0"), Expr::parse("-1")}, {}};
    n.constraints = {{0, 1, Predicate::always(), {0}}};
    n.events.rules = {{Predicate::parse("x[0][0] >= 0"), "stop"}};
    n.events.default_target = "free";
    return n;
}

}  // namespace

TEST_CASE("connection structure basics") {
    ConnectionStructure a(3);
    CHECK(a.empty());
    a.set_edge(0, 2);
    a.set_constraint(1, 2);
    CHECK(a.depends(0, 2));
    CHECK_FALSE(a.depends(2, 0));
    CHECK(a.constraint(1) == 2);
    CHECK(ConnectionStructure(a.rows()) == a);
    CHECK_THROWS(a.set_edge(1, 1));
}

TEST_CASE("event map takes the first matching rule") {
    Network net(tiny());
    CHECK(validate_network(net).empty());
    CHECK(net.structure_name(net.eval_event_map(net.make_state({-1.0, 0.0}))) == "free");
    CHECK(net.structure_name(net.eval_event_map(net.make_state({0.0, 0.0}))) == "stop");
}

TEST_CASE("frozen coordinates come from constraints") {
    Network net(tiny());
    CHECK(net.frozen_coords(net.structure_index("stop")) == std::vector<int>{0});
    CHECK(net.frozen_coords(net.structure_index("free")).empty());
}

TEST_CASE("validation reports structural problems") {
    NetworkSpec bad = tiny();
    bad.events.rules.push_back({Predicate::parse("x[1][0] > 5"), "missing"});
    auto probs = validate_network(Network(bad));
    REQUIRE_FALSE(probs.empty());
    bool mentions = false;
    for (const auto& p : probs) mentions |= p.find("missing") != std::string::npos;
    CHECK(mentions);

    NetworkSpec nofield = tiny();
    nofield.fields.erase("stop");
    CHECK_FALSE(validate_network(Network(nofield)).empty());
}

TEST_CASE("states are checked against interval factors") {
    Network net = build_trains(TrainsParams{});
    CHECK_NOTHROW(net.make_state({-1.0, 1.0}));
    CHECK_THROWS_AS(net.make_state({-1.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(net.make_state({0.0}), std::invalid_argument);
}

TEST_CASE("trains termination set is both trains at their far ends") {
    Network net = build_trains(TrainsParams{});
    NetworkState done = net.make_state({1.0, -1.0});
    NetworkState half = net.make_state({1.0, 0.5});
    CHECK(net.termination_reached(done.x.data(), done.tau.data()));
    CHECK_FALSE(net.termination_reached(half.x.data(), half.tau.data()));
}

TEST_CASE("coordinate labels follow declaration order") {
    Network net = build_trains_oscillators(TrainsParams{}, OscillatorParams{});
    auto labels = net.coordinate_labels();
    REQUIRE(labels.size() == 4);
    CHECK(labels[0].rfind("T1", 0) == 0);
    CHECK(labels[2].rfind("T2", 0) == 0);
}

TEST_CASE("admissibility flags a field reading a node it does not depend on") {
    NetworkSpec n = tiny();
    n.fields["free"].coords[0] = Expr::parse("x[1][0]");
    Network net(n);
    auto rep = check_admissibility(net, net.structure_index("free"), 2000, 3);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("admissibility accepts the trains network") {
    Network net = build_trains(TrainsParams{});
    for (int a = 0; a < net.structure_count(); ++a) CHECK(check_admissibility(net, a, 2000, 1).ok());
    CHECK(check_constraint_regularity(net, 2000, 1e-6, 1).ok());
}
