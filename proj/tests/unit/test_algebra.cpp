#include <catch_amalgamated.hpp>

#include <set>

#include "asynet/algebra.hpp"
#include "asynet/checks.hpp"
#include "asynet/models.hpp"

using namespace asynet;

namespace {

// Every 2-node structure with constraint entries in {0, 1}.
std::vector<ConnectionStructure> all_two_node() {
    std::vector<ConnectionStructure> out;
    for (int bits = 0; bits < 16; ++bits) {
        ConnectionStructure a(2);
        a.set_constraint(0, bits & 1);
        a.set_constraint(1, (bits >> 1) & 1);
        if (bits & 4) a.set_edge(0, 1);
        if (bits & 8) a.set_edge(1, 0);
        out.push_back(a);
    }
    return out;
}

ConnectionStructure random_structure(int k, Rng& rng) {
    ConnectionStructure a(k);
    for (int i = 0; i < k; ++i) {
        if (uniform01(rng) < 0.3) a.set_constraint(i, 1);
        for (int j = 0; j < k; ++j)
            if (i != j && uniform01(rng) < 0.3) a.set_edge(i, j);
    }
    return a;
}

}  // namespace

TEST_CASE("join laws, exhaustive on two nodes") {
    auto all = all_two_node();
    ConnectionStructure empty(2);
    for (const auto& a : all) {
        CHECK(join(a, empty) == a);
        CHECK(join(a, a) == a);
        for (const auto& b : all) {
            CHECK(join(a, b) == join(b, a));
            for (const auto& c : all) CHECK(join(join(a, b), c) == join(a, join(b, c)));
        }
    }
}

TEST_CASE("join laws, randomized on five nodes") {
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        auto a = random_structure(5, rng), b = random_structure(5, rng), c = random_structure(5, rng);
        CHECK(join(a, b) == join(b, a));
        CHECK(join(join(a, b), c) == join(a, join(b, c)));
        CHECK(join(a, a) == a);
    }
}

TEST_CASE("join of the two single stops is beta") {
    ConnectionStructure a1(2), a2(2), beta(2);
    a1.set_constraint(0, 1);
    a2.set_constraint(1, 1);
    beta.set_constraint(0, 1);
    beta.set_constraint(1, 1);
    CHECK(join(a1, a2) == beta);
}

TEST_CASE("join rejects conflicting constraint indices") {
    ConnectionStructure a(2), b(2);
    a.set_constraint(0, 1);
    b.set_constraint(0, 2);
    CHECK_THROWS_AS(join(a, b), std::invalid_argument);
    CHECK_THROWS_AS(join(ConnectionStructure(2), ConnectionStructure(3)), std::invalid_argument);
}

TEST_CASE("embed and project") {
    ConnectionStructure one(1);
    one.set_constraint(0, 1);
    auto e = embed(one, {2}, 3);
    CHECK(e.constraint(0) == 0);
    CHECK(e.constraint(1) == 0);
    CHECK(e.constraint(2) == 1);
    CHECK(project(e, {2}) == one);

    // disjoint embeddings join to a block structure
    for (const auto& a : all_two_node())
        for (const auto& b : all_two_node()) {
            auto j = join(embed(a, {0, 1}, 4), embed(b, {2, 3}, 4));
            for (int i : {0, 1})
                for (int k : {2, 3}) {
                    CHECK_FALSE(j.depends(i, k));
                    CHECK_FALSE(j.depends(k, i));
                }
            CHECK(project(j, {0, 1}) == a);
            CHECK(project(j, {2, 3}) == b);
        }
}

TEST_CASE("connection graph components") {
    CHECK(connection_graph(build_trains(TrainsParams{})).components().size() == 1);
    Network trains = build_trains(TrainsParams{});
    CHECK(connection_graph(product(trains, build_blinking_pair(1, 1, 1))).components().size() == 2);

    NetworkSpec n;
    n.name = "three";
    n.nodes = {{"a", {Factor::real_line()}, 0}, {"b", {Factor::real_line()}, 0}, {"c", {Factor::real_line()}, 0}};
    n.structure_names = {"empty"};
    n.structures = {ConnectionStructure(3)};
    n.fields["empty"] = {{Expr(0.0), Expr(0.0), Expr(0.0)}, {}};
    n.events.default_target = "empty";
    auto g = connection_graph(Network(n));
    CHECK(g.components().size() == 3);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("product structure count and naming") {
    Network a = build_trains(TrainsParams{});          // 4 structures
    Network b = build_blinking_pair(1.0, 1.5, 1.0);     // 2 structures
    Network p = product(a, b);
    CHECK(p.structure_count() == 8);
    CHECK(p.structure_index("beta|coupled") >= 0);
    CHECK(p.node_count() == 4);
    CHECK(validate_network(p).empty());
}

TEST_CASE("product with an uncoupled node leaves the other factor unchanged") {
    Network a = build_trains(TrainsParams{});
    NetworkSpec idle;
    idle.name = "idle";
    idle.nodes = {{"I", {Factor::real_line()}, 0}};
    idle.structure_names = {"rest"};
    idle.structures = {ConnectionStructure(1)};
    idle.fields["rest"] = {{Expr(0.0)}, {}};
    idle.events.default_target = "rest";
    Network p = product(a, Network(idle));
    IntegratorConfig cfg;
    cfg.output_times = {0.5, 1.5, 2.5};
    Trajectory ta = integrate(a, trains_initial_state(a, -1, 1), cfg);
    Trajectory tp = integrate(p, p.make_state({-1, 1, 0}), cfg);
    for (double t : cfg.output_times) {
        REQUIRE(ta.sample_at(t));
        REQUIRE(tp.sample_at(t));
        CHECK(ta.sample_at(t)->x[0] == Catch::Approx(tp.sample_at(t)->x[0]).margin(1e-12));
        CHECK(ta.sample_at(t)->x[1] == Catch::Approx(tp.sample_at(t)->x[1]).margin(1e-12));
    }
}

TEST_CASE("decomposability certificates on the two event maps") {
    Network first = build_struc_indecomp(false, false);
    auto c = connection_graph(first).components();
    REQUIRE(c.size() == 2);
    auto v = check_structural_decomposability(first, c[0], 5000, 1);
    CHECK_FALSE(v.pass);
    CHECK(v.counterexample.has_value());

    Network second = build_struc_indecomp(true, false);
    for (const auto& comp : connection_graph(second).components()) {
        CHECK(check_structural_decomposability(second, comp, 5000, 1).pass);
        CHECK(check_dynamical_decomposability(second, comp, 5000, 1).pass);
    }
    Network bad = build_struc_indecomp(true, true);
    CHECK_FALSE(check_dynamical_decomposability(bad, connection_graph(bad).components()[0], 5000, 1).pass);
}

TEST_CASE("factorize never splits a single component") {
    Factorization f = factorize(build_trains(TrainsParams{}), 500, 1);
    CHECK_FALSE(f.decomposed);
    CHECK(f.partition.size() == 1);
}

TEST_CASE("factorize recovers product factors with a stable partition") {
    Network p = product(build_trains(TrainsParams{}), build_blinking_pair(1.0, 1.5, 1.0));
    Factorization f = factorize(p, 1000, 1);
    REQUIRE(f.decomposed);
    REQUIRE(f.factors.size() == 2);
    for (std::uint64_t s : {2, 3, 4}) CHECK(factorize(p, 300, s).partition == f.partition);
    CHECK(f.factors[0].spec().metadata.count("anchor") == 1);
    for (const auto& fac : f.factors) CHECK(validate_network(fac).empty());
}

TEST_CASE("additive asynchronization") {
    Network net = build_blinking_pair(1.0, 1.5, 2.0);
    CHECK(is_input_consistent(net, 2000, 1).pass);
    NetworkState s = net.make_state({0.3, 1.1});
    Derivative coupled = net.eval_field(net.structure_index("coupled"), s);
    Derivative empty = net.eval_field(net.structure_index("empty"), s);
    CHECK(coupled.dx[0] == Catch::Approx(1.0 + 2.0 * std::sin(0.8)));
    CHECK(empty.dx[0] == 1.0);
    CHECK(empty.dx[1] == 1.5);
    for (const auto& comp : connection_graph(net).components()) CHECK(check_dynamical_decomposability(net, comp, 1000, 1).pass);
}

TEST_CASE("a stop bit zeroes the node field") {
    AdditiveNetworkSpec spec;
    spec.name = "stopper";
    spec.nodes = {{"A", {Factor::real_line()}, 1}, {"B", {Factor::real_line()}, 0}};
    spec.intrinsic = {{Expr::parse("1")}, {Expr::parse("2")}};
    spec.coupling[{0, 1}] = {Expr::parse("x[1][0]")};
    spec.gamma = ConnectionStructure(2);
    spec.gamma.set_edge(0, 1);
    ConnectionStructure stopped = spec.gamma;
    stopped.set_constraint(0, 1);
    Network net = asynchronize_additive(spec, {{"base", spec.gamma}, {"stopped", stopped}});
    NetworkState s = net.make_state({0.0, 3.0});
    CHECK(net.eval_field(net.structure_index("base"), s).dx[0] == 4.0);
    CHECK(net.eval_field(net.structure_index("stopped"), s).dx[0] == 0.0);

    ConnectionStructure not_sub(2);
    not_sub.set_edge(1, 0);
    CHECK_THROWS_AS(asynchronize_additive(spec, {{"base", spec.gamma}, {"bad", not_sub}}), std::invalid_argument);
}

TEST_CASE("input consistency fails for a crafted field") {
    NetworkSpec n;
    n.name = "inconsistent";
    n.nodes = {{"A", {Factor::real_line()}, 0}};
    n.structure_names = {"p", "q"};
    ConnectionStructure q(1);
    n.structures = {ConnectionStructure(1), q};
    n.fields["p"] = {{Expr(1.0)}, {}};
    n.fields["q"] = {{Expr(2.0)}, {}};
    n.events.rules = {{Predicate::parse("x[0][0] > 0"), "q"}};
    n.events.default_target = "p";
    CHECK_FALSE(is_input_consistent(Network(n), 100, 1).pass);
}
