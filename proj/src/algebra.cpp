#include "asynet/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "asynet/checks.hpp"

namespace asynet {

// ---------------------------------------------------------------- structures

ConnectionStructure join(const ConnectionStructure& a, const ConnectionStructure& b) {
    if (a.k() != b.k()) throw std::invalid_argument("join needs structures over the same node set");
    ConnectionStructure out(a.k());
    for (int i = 0; i < a.k(); ++i) {
        int ca = a.constraint(i), cb = b.constraint(i);
        if (ca != 0 && cb != 0 && ca != cb)
            throw std::invalid_argument("join: node " + std::to_string(i) + " carries constraints " + std::to_string(ca) + " and " + std::to_string(cb));
        out.set_constraint(i, std::max(ca, cb));
        for (int j = 0; j < a.k(); ++j)
            if (a.depends(i, j) || b.depends(i, j)) out.set_edge(i, j);
    }
    return out;
}

ConnectionStructure embed(const ConnectionStructure& a, const std::vector<int>& positions, int k) {
    if (static_cast<int>(positions.size()) != a.k()) throw std::invalid_argument("embed: position count must equal the structure's node count");
    std::set<int> seen;
    for (int p : positions) {
        if (p < 0 || p >= k) throw std::invalid_argument("embed: position out of range");
        if (!seen.insert(p).second) throw std::invalid_argument("embed: label collision at position " + std::to_string(p));
    }
    ConnectionStructure out(k);
    for (int i = 0; i < a.k(); ++i) {
        out.set_constraint(positions[static_cast<std::size_t>(i)], a.constraint(i));
        for (int j = 0; j < a.k(); ++j)
            if (a.depends(i, j)) out.set_edge(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]);
    }
    return out;
}

ConnectionStructure project(const ConnectionStructure& a, const std::vector<int>& positions) {
    ConnectionStructure out(static_cast<int>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        out.set_constraint(static_cast<int>(i), a.constraint(positions[i]));
        for (std::size_t j = 0; j < positions.size(); ++j)
            if (i != j && a.depends(positions[i], positions[j])) out.set_edge(static_cast<int>(i), static_cast<int>(j));
    }
    return out;
}

std::vector<std::vector<int>> ConnectionGraph::components() const {
    std::vector<int> comp(static_cast<std::size_t>(k), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < k; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> members, stack{s};
        comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (int v = 0; v < k; ++v) {
                bool linked = adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] || adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
                if (linked && comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = comp[static_cast<std::size_t>(s)];
                    stack.push_back(v);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

int ConnectionGraph::edge_count() const {
    int n = 0;
    for (const auto& row : adj) n += std::accumulate(row.begin(), row.end(), 0);
    return n;
}

ConnectionGraph connection_graph(const Network& net) {
    ConnectionGraph g;
    g.k = net.node_count();
    g.adj.assign(static_cast<std::size_t>(g.k), std::vector<int>(static_cast<std::size_t>(g.k), 0));
    for (int a = 0; a < net.structure_count(); ++a) {
        const auto& st = net.structure(a);
        if (st.k() != g.k) continue;
        for (int i = 0; i < g.k; ++i)
            for (int j = 0; j < g.k; ++j)
                if (st.depends(i, j)) g.adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    }
    for (int i = 0; i < g.k; ++i) {
        const auto& n = net.spec().nodes[static_cast<std::size_t>(i)].name;
        g.labels.push_back(n.empty() ? "N" + std::to_string(i + 1) : n);
    }
    return g;
}

// ---------------------------------------------------------------- predicates

Predicate fold_predicate(const Predicate& p, double eps_eq) {
    std::function<PredPtr(const PredNode&)> walk = [&](const PredNode& n) -> PredPtr {
        auto lit = [](bool v) { return v ? Predicate::always().node() : Predicate::never().node(); };
        auto make = [](PredNode node) { return std::make_shared<const PredNode>(std::move(node)); };
        switch (n.kind) {
            case PredNode::Kind::True:
            case PredNode::Kind::False: return make(n);
            case PredNode::Kind::Atom: {
                Expr g = n.atom.g().fold();
                if (g.node().op == ExprOp::Const) return make(lit(atom_holds(n.atom.cmp, g.node().value, eps_eq)));
                PredNode out = n;
                out.atom.lhs = n.atom.lhs.fold();
                out.atom.rhs = n.atom.rhs.fold();
                return make(out);
            }
            case PredNode::Kind::Not: {
                PredPtr k = walk(*n.kids[0]);
                if (k->kind == PredNode::Kind::True) return make(lit(false));
                if (k->kind == PredNode::Kind::False) return make(lit(true));
                PredNode out;
                out.kind = PredNode::Kind::Not;
                out.kids.push_back(k);
                return make(out);
            }
            case PredNode::Kind::And:
            case PredNode::Kind::Or: {
                const bool is_and = n.kind == PredNode::Kind::And;
                PredNode out;
                out.kind = n.kind;
                for (const auto& kid : n.kids) {
                    PredPtr k = walk(*kid);
                    if (k->kind == (is_and ? PredNode::Kind::False : PredNode::Kind::True)) return make(lit(!is_and));
                    if (k->kind == (is_and ? PredNode::Kind::True : PredNode::Kind::False)) continue;
                    out.kids.push_back(k);
                }
                if (out.kids.empty()) return make(lit(is_and));
                if (out.kids.size() == 1) return out.kids.front();
                return make(out);
            }
        }
        return make(n);
    };
    return Predicate(walk(p.node()));
}

// ---------------------------------------------------------------- product

Network product(const Network& na, const Network& nb) {
    const NetworkSpec& A = na.spec();
    const NetworkSpec& B = nb.spec();
    const int ka = na.node_count();
    const int k = ka + nb.node_count();

    std::set<std::string> names;
    for (const auto& n : A.nodes)
        if (!n.name.empty()) names.insert(n.name);
    for (const auto& n : B.nodes)
        if (!n.name.empty() && names.count(n.name)) throw std::invalid_argument("product: node name '" + n.name + "' appears in both networks");
    std::set<std::string> clocks;
    for (const auto& c : A.clocks) clocks.insert(c.name);
    for (const auto& c : B.clocks)
        if (clocks.count(c.name)) throw std::invalid_argument("product: clock '" + c.name + "' appears in both networks");

    NetworkSpec P;
    P.name = A.name + "x" + B.name;
    P.nodes = A.nodes;
    P.nodes.insert(P.nodes.end(), B.nodes.begin(), B.nodes.end());
    P.params = A.params;
    std::map<std::string, std::string> renames;
    for (const auto& [name, value] : B.params) {
        auto it = P.params.find(name);
        if (it == P.params.end()) {
            P.params[name] = value;
        } else if (it->second != value) {
            std::string fresh = name + "__b";
            while (P.params.count(fresh) || B.params.count(fresh)) fresh += "_";
            renames[name] = fresh;
            P.params[fresh] = value;
        }
    }
    auto shift_b = [&](const Expr& e) { return e.remap_nodes([ka](int i) { return i + ka; }).rename_params(renames); };

    std::vector<int> pos_a(static_cast<std::size_t>(ka)), pos_b(static_cast<std::size_t>(nb.node_count()));
    std::iota(pos_a.begin(), pos_a.end(), 0);
    std::iota(pos_b.begin(), pos_b.end(), ka);
    for (int a = 0; a < na.structure_count(); ++a) {
        for (int b = 0; b < nb.structure_count(); ++b) {
            std::string name = na.structure_name(a) + "|" + nb.structure_name(b);
            P.structure_names.push_back(name);
            P.structures.push_back(join(embed(na.structure(a), pos_a, k), embed(nb.structure(b), pos_b, k)));
            auto fa = A.fields.find(na.structure_name(a));
            auto fb = B.fields.find(nb.structure_name(b));
            if (fa == A.fields.end() || fb == B.fields.end()) continue;
            VectorFieldSpec f = fa->second;
            for (const auto& e : fb->second.coords) f.coords.push_back(shift_b(e));
            f.clock_rates.insert(f.clock_rates.end(), fb->second.clock_rates.begin(), fb->second.clock_rates.end());
            P.fields[name] = std::move(f);
        }
    }
    P.clocks = A.clocks;
    P.clocks.insert(P.clocks.end(), B.clocks.begin(), B.clocks.end());
    P.constraints = A.constraints;
    for (auto c : B.constraints) {
        c.node += ka;
        c.region = c.region.transform_exprs(shift_b);
        P.constraints.push_back(std::move(c));
    }

    // Each factor's rules as disjoint regions (first-match made explicit).
    auto regions = [](const EventMapSpec& ev, const std::function<Expr(const Expr&)>& map) {
        std::vector<std::pair<Predicate, std::string>> out;
        Predicate none_before = Predicate::always();
        for (const auto& r : ev.rules) {
            Predicate p = r.when.transform_exprs(map);
            out.emplace_back(fold_predicate(none_before && p), r.target);
            none_before = none_before && !p;
        }
        out.emplace_back(fold_predicate(none_before), ev.default_target);
        return out;
    };
    auto ra = regions(A.events, [](const Expr& e) { return e; });
    auto rb = regions(B.events, shift_b);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        for (std::size_t j = 0; j < rb.size(); ++j) {
            std::string target = ra[i].second + "|" + rb[j].second;
            if (i + 1 == ra.size() && j + 1 == rb.size()) {
                P.events.default_target = target;
                continue;
            }
            Predicate p = fold_predicate(ra[i].first && rb[j].first);
            if (p.node().kind == PredNode::Kind::False) continue;
            P.events.rules.push_back({p, target});
        }
    }
    if (A.termination && B.termination) {
        TerminationSpec t = *A.termination;
        for (const auto& p : B.termination->targets) t.targets.push_back(p.transform_exprs(shift_b));
        for (const auto& p : B.termination->initialization) t.initialization.push_back(p.transform_exprs(shift_b));
        P.termination = std::move(t);
    }
    P.metadata["product_of"] = A.name + "," + B.name;
    return Network(std::move(P));
}

// ---------------------------------------------------------------- decomposability

namespace {

std::vector<char> membership(const Network& net, const std::vector<int>& component) {
    std::vector<char> in(static_cast<std::size_t>(net.node_count()), 0);
    for (int i : component) in[static_cast<std::size_t>(i)] = 1;
    return in;
}

std::string state_str(const Network& net, const NetworkState& s) {
    std::ostringstream os;
    auto labels = net.coordinate_labels();
    for (std::size_t c = 0; c < s.x.size(); ++c) os << (c ? ", " : "") << labels[c] << "=" << format_number(s.x[c]);
    for (std::size_t c = 0; c < s.tau.size(); ++c) os << ", " << net.spec().clocks[c].name << "=" << format_number(s.tau[c]);
    return os.str();
}

}  // namespace

std::vector<int> clocks_owned_by(const Network& net, const std::vector<int>& component) {
    std::vector<int> out;
    for (int c = 0; c < net.clock_count(); ++c) {
        bool owned = true;
        for (int a = 0; a < net.structure_count() && owned; ++a)
            for (int b = a + 1; b < net.structure_count() && owned; ++b)
                if (project(net.structure(a), component) == project(net.structure(b), component) &&
                    net.clock_rates(a)[static_cast<std::size_t>(c)] != net.clock_rates(b)[static_cast<std::size_t>(c)])
                    owned = false;
        if (owned) out.push_back(c);
    }
    return out;
}

DecompVerdict check_structural_decomposability(const Network& net, const std::vector<int>& component, int n_samples, std::uint64_t seed) {
    DecompVerdict v;
    const auto in = membership(net, component);
    if (static_cast<int>(component.size()) == net.node_count()) {
        v.message = "component is the whole network; nothing to separate";
        return v;
    }
    const auto owned = clocks_owned_by(net, component);
    std::vector<char> clock_in(static_cast<std::size_t>(net.clock_count()), 0);
    for (int c : owned) clock_in[static_cast<std::size_t>(c)] = 1;
    Rng rng(seed);
    StateSampler sampler(net);
    auto splice = [&](const NetworkState& keep, const NetworkState& other) {
        NetworkState y = keep;
        for (int c = 0; c < net.dim(); ++c)
            if (!in[static_cast<std::size_t>(net.node_of(c))]) y.x[static_cast<std::size_t>(c)] = other.x[static_cast<std::size_t>(c)];
        for (int c = 0; c < net.clock_count(); ++c)
            if (!clock_in[static_cast<std::size_t>(c)]) y.tau[static_cast<std::size_t>(c)] = other.tau[static_cast<std::size_t>(c)];
        return y;
    };
    for (int s = 0; s < n_samples; ++s) {
        NetworkState X = sampler.mixed(rng);
        NetworkState Xp = sampler.mixed(rng);
        for (const auto& [p, q] : {std::pair{X, splice(X, Xp)}, std::pair{Xp, splice(Xp, X)}}) {
            ++v.samples;
            auto a = project(net.structure(net.eval_event_map(p)), component);
            auto b = project(net.structure(net.eval_event_map(q)), component);
            if (a != b) {
                v.pass = false;
                v.counterexample = p;
                v.counterexample_other = q;
                v.message = "structural check failed: the event map restricted to the component changes with the other nodes";
                v.detail = "at (" + state_str(net, p) + ") projection is [" + a.str() + "], at (" + state_str(net, q) + ") it is [" + b.str() + "]";
                return v;
            }
        }
    }
    v.message = "no counterexample in " + std::to_string(v.samples) + " samples";
    return v;
}

DecompVerdict check_dynamical_decomposability(const Network& net, const std::vector<int>& component, int n_samples, std::uint64_t seed) {
    DecompVerdict v;
    const auto in = membership(net, component);
    const auto owned = clocks_owned_by(net, component);
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < net.structure_count(); ++a)
        for (int b = a + 1; b < net.structure_count(); ++b)
            if (project(net.structure(a), component) == project(net.structure(b), component)) pairs.emplace_back(a, b);
    if (pairs.empty()) {
        v.message = "no two structures share a projection; vacuous pass";
        return v;
    }
    Rng rng(seed);
    StateSampler sampler(net);
    std::vector<double> fa(static_cast<std::size_t>(net.dim())), fb(static_cast<std::size_t>(net.dim()));
    for (int s = 0; s < n_samples; ++s) {
        NetworkState X = sampler.mixed(rng);
        ++v.samples;
        for (auto [a, b] : pairs) {
            net.eval_field(a, X.x.data(), X.tau.data(), fa.data());
            net.eval_field(b, X.x.data(), X.tau.data(), fb.data());
            for (int c = 0; c < net.dim(); ++c) {
                if (!in[static_cast<std::size_t>(net.node_of(c))]) continue;
                if (std::fabs(fa[static_cast<std::size_t>(c)] - fb[static_cast<std::size_t>(c)]) > 1e-12) {
                    v.pass = false;
                    v.counterexample = X;
                    v.message = "dynamical check failed: structures '" + net.structure_name(a) + "' and '" + net.structure_name(b) + "' agree on the component but their fields differ";
                    v.detail = "coordinate " + net.coordinate_labels()[static_cast<std::size_t>(c)] + ": " + format_number(fa[static_cast<std::size_t>(c)]) + " vs " + format_number(fb[static_cast<std::size_t>(c)]) + " at (" + state_str(net, X) + ")";
                    return v;
                }
            }
            for (int c : owned)
                if (net.clock_rates(a)[static_cast<std::size_t>(c)] != net.clock_rates(b)[static_cast<std::size_t>(c)]) {
                    v.pass = false;
                    v.message = "dynamical check failed: clock '" + net.spec().clocks[static_cast<std::size_t>(c)].name + "' rate differs";
                    return v;
                }
        }
    }
    v.message = "no counterexample in " + std::to_string(v.samples) + " samples";
    return v;
}

// ---------------------------------------------------------------- factorize

namespace {

std::vector<std::string> split_name(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == '|') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

Network build_factor(const Network& net, const std::vector<std::vector<int>>& parts, std::size_t ell, const std::vector<int>& clock_owner, const NetworkState& anchor) {
    const auto& spec = net.spec();
    const auto& C = parts[ell];
    std::vector<int> new_index(static_cast<std::size_t>(net.node_count()), -1);
    for (std::size_t i = 0; i < C.size(); ++i) new_index[static_cast<std::size_t>(C[i])] = static_cast<int>(i);
    const auto& L = net.layout();

    auto localize = [&](const Expr& e) {
        return e
            .transform([&](const ExprNode& n) -> ExprPtr {
                if (n.op == ExprOp::State) {
                    int ni = new_index[static_cast<std::size_t>(n.node)];
                    if (ni >= 0) return Expr::state(ni, n.coord).ptr();
                    return Expr::constant(anchor.x[static_cast<std::size_t>(L.flat_index(n.node, n.coord))]).ptr();
                }
                if (n.op == ExprOp::Clock) {
                    int c = L.clock_index(n.name);
                    if (clock_owner[static_cast<std::size_t>(c)] != static_cast<int>(ell)) return Expr::constant(anchor.tau[static_cast<std::size_t>(c)]).ptr();
                }
                return nullptr;
            })
            .fold();
    };

    // Projected structures and their names.
    std::vector<ConnectionStructure> proj;
    std::vector<int> proj_of(static_cast<std::size_t>(net.structure_count()));
    for (int a = 0; a < net.structure_count(); ++a) {
        auto p = project(net.structure(a), C);
        auto it = std::find(proj.begin(), proj.end(), p);
        proj_of[static_cast<std::size_t>(a)] = static_cast<int>(it - proj.begin());
        if (it == proj.end()) proj.push_back(p);
    }
    std::vector<std::string> pname(proj.size());
    bool tokens_ok = true;
    for (int a = 0; a < net.structure_count() && tokens_ok; ++a) {
        auto toks = split_name(net.structure_name(a));
        if (toks.size() != parts.size()) {
            tokens_ok = false;
            break;
        }
        auto& slot = pname[static_cast<std::size_t>(proj_of[static_cast<std::size_t>(a)])];
        if (slot.empty())
            slot = toks[ell];
        else if (slot != toks[ell])
            tokens_ok = false;
    }
    if (tokens_ok) {
        std::set<std::string> uniq(pname.begin(), pname.end());
        tokens_ok = uniq.size() == pname.size();
    }
    if (!tokens_ok)
        for (std::size_t p = 0; p < proj.size(); ++p) pname[p] = "s" + std::to_string(p);

    NetworkSpec F;
    F.name = spec.name + "[" + std::to_string(ell) + "]";
    for (int i : C) F.nodes.push_back(spec.nodes[static_cast<std::size_t>(i)]);
    F.params = spec.params;
    std::vector<int> clocks_here;
    for (int c = 0; c < net.clock_count(); ++c)
        if (clock_owner[static_cast<std::size_t>(c)] == static_cast<int>(ell)) {
            clocks_here.push_back(c);
            F.clocks.push_back(spec.clocks[static_cast<std::size_t>(c)]);
        }
    for (std::size_t p = 0; p < proj.size(); ++p) {
        F.structure_names.push_back(pname[p]);
        F.structures.push_back(proj[p]);
        int rep = static_cast<int>(std::find(proj_of.begin(), proj_of.end(), static_cast<int>(p)) - proj_of.begin());
        auto it = spec.fields.find(net.structure_name(rep));
        if (it == spec.fields.end()) continue;
        VectorFieldSpec f;
        for (int i : C)
            for (int c = 0; c < L.dims[static_cast<std::size_t>(i)]; ++c) f.coords.push_back(localize(it->second.coords[static_cast<std::size_t>(L.flat_index(i, c))]));
        for (int c : clocks_here) f.clock_rates.push_back(it->second.clock_rates[static_cast<std::size_t>(c)]);
        F.fields[pname[p]] = std::move(f);
    }
    for (const auto& r : spec.events.rules) {
        Predicate p = fold_predicate(r.when.transform_exprs(localize));
        if (p.node().kind == PredNode::Kind::False) continue;
        int t = net.structure_index(r.target);
        F.events.rules.push_back({p, pname[static_cast<std::size_t>(proj_of[static_cast<std::size_t>(t)])]});
        if (p.node().kind == PredNode::Kind::True) break;
    }
    F.events.default_target = pname[static_cast<std::size_t>(proj_of[static_cast<std::size_t>(net.structure_index(spec.events.default_target))])];
    for (const auto& c : spec.constraints) {
        if (new_index[static_cast<std::size_t>(c.node)] < 0) continue;
        ConstraintSpec cc = c;
        cc.node = new_index[static_cast<std::size_t>(c.node)];
        cc.region = c.region.transform_exprs(localize);
        F.constraints.push_back(std::move(cc));
    }
    if (spec.termination) {
        TerminationSpec t;
        for (int i : C) {
            t.targets.push_back(spec.termination->targets[static_cast<std::size_t>(i)].transform_exprs(localize));
            if (static_cast<std::size_t>(i) < spec.termination->initialization.size()) t.initialization.push_back(spec.termination->initialization[static_cast<std::size_t>(i)].transform_exprs(localize));
        }
        F.termination = std::move(t);
    }
    std::ostringstream anchor_txt;
    for (std::size_t c = 0; c < anchor.x.size(); ++c) anchor_txt << (c ? " " : "") << format_number(anchor.x[c]);
    if (!anchor.tau.empty()) anchor_txt << " ;";
    for (double tv : anchor.tau) anchor_txt << " " << format_number(tv);
    F.metadata["anchor"] = anchor_txt.str();
    std::ostringstream nodes_txt;
    for (std::size_t i = 0; i < C.size(); ++i) nodes_txt << (i ? "," : "") << C[i];
    F.metadata["source_nodes"] = nodes_txt.str();
    return Network(std::move(F));
}

}  // namespace

Factorization factorize(const Network& net, int n_samples, std::uint64_t seed) {
    Factorization out;
    out.partition = connection_graph(net).components();
    if (out.partition.size() < 2) {
        out.reason = "connection graph is connected: indecomposable";
        return out;
    }
    bool ok = true;
    for (std::size_t p = 0; p < out.partition.size(); ++p) {
        out.structural.push_back(check_structural_decomposability(net, out.partition[p], n_samples, seed + p));
        out.dynamical.push_back(check_dynamical_decomposability(net, out.partition[p], n_samples, seed + 1000 + p));
        ok = ok && out.structural.back().pass && out.dynamical.back().pass;
    }
    if (!ok) {
        for (std::size_t p = 0; p < out.partition.size(); ++p) {
            if (!out.structural[p].pass) {
                out.reason = "component " + std::to_string(p) + ": " + out.structural[p].message;
                break;
            }
            if (!out.dynamical[p].pass) {
                out.reason = "component " + std::to_string(p) + ": " + out.dynamical[p].message;
                break;
            }
        }
        return out;
    }
    std::vector<int> owner(static_cast<std::size_t>(net.clock_count()), -1);
    for (std::size_t p = 0; p < out.partition.size(); ++p)
        for (int c : clocks_owned_by(net, out.partition[p]))
            if (owner[static_cast<std::size_t>(c)] < 0) owner[static_cast<std::size_t>(c)] = static_cast<int>(p);
    for (auto& o : owner)
        if (o < 0) o = 0;
    Rng rng(seed);
    NetworkState anchor = StateSampler(net).any(rng);
    for (std::size_t p = 0; p < out.partition.size(); ++p) out.factors.push_back(build_factor(net, out.partition, p, owner, anchor));
    out.decomposed = true;
    out.reason = "factorized into " + std::to_string(out.factors.size()) + " components";
    return out;
}

// ---------------------------------------------------------------- additive input structure

Network asynchronize_additive(const AdditiveNetworkSpec& spec, const std::vector<NamedStructure>& structures, EventMapSpec events) {
    const int k = static_cast<int>(spec.nodes.size());
    if (spec.gamma.k() != k) throw std::invalid_argument("base graph size differs from node count");
    for (const auto& [ij, terms] : spec.coupling)
        if (!spec.gamma.depends(ij.first, ij.second)) throw std::invalid_argument("coupling term given for an edge not in the base graph");
    ConnectionStructure base(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (spec.gamma.depends(i, j)) base.set_edge(i, j);
    NetworkSpec N;
    N.name = spec.name;
    N.nodes = spec.nodes;
    N.params = spec.params;
    for (auto& n : N.nodes) n.constraint_count = 1;
    for (int i = 0; i < k; ++i) {
        ConstraintSpec c;
        c.node = i;
        c.index = 1;
        c.region = Predicate::always();
        for (std::size_t q = 0; q < spec.nodes[static_cast<std::size_t>(i)].factors.size(); ++q) c.frozen.push_back(static_cast<int>(q));
        N.constraints.push_back(std::move(c));
    }
    std::string base_name;
    for (const auto& [name, a] : structures) {
        if (a.k() != k) throw std::invalid_argument("structure '" + name + "' has the wrong size");
        for (int i = 0; i < k; ++i) {
            if (a.constraint(i) > 1) throw std::invalid_argument("structure '" + name + "': stop bits must be 0 or 1");
            for (int j = 0; j < k; ++j)
                if (a.depends(i, j) && !spec.gamma.depends(i, j)) throw std::invalid_argument("structure '" + name + "' is not a subgraph of the base graph");
        }
        if (a == base) base_name = name;
        VectorFieldSpec f;
        for (int i = 0; i < k; ++i) {
            const auto& Fi = spec.intrinsic[static_cast<std::size_t>(i)];
            for (std::size_t q = 0; q < Fi.size(); ++q) {
                if (a.constraint(i) == 1) {
                    f.coords.emplace_back(0.0);
                    continue;
                }
                Expr e = Fi[q];
                for (int j = 0; j < k; ++j) {
                    auto it = spec.coupling.find({i, j});
                    if (a.depends(i, j) && it != spec.coupling.end()) e = e + it->second[q];
                }
                f.coords.push_back(e.fold());
            }
        }
        N.structure_names.push_back(name);
        N.structures.push_back(a);
        N.fields[name] = std::move(f);
    }
    if (base_name.empty()) throw std::invalid_argument("the unconstrained base structure (0 | gamma) must be in the list");
    if (events.default_target.empty()) events.default_target = base_name;
    N.events = std::move(events);
    return Network(std::move(N));
}

DecompVerdict is_input_consistent(const Network& net, int n_samples, std::uint64_t seed) {
    DecompVerdict v;
    const auto& L = net.layout();
    struct Pair {
        int node, a, b;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < net.node_count(); ++i)
        for (int a = 0; a < net.structure_count(); ++a)
            for (int b = a + 1; b < net.structure_count(); ++b) {
                const auto ra = net.structure(a).rows()[static_cast<std::size_t>(i)];
                const auto rb = net.structure(b).rows()[static_cast<std::size_t>(i)];
                if (ra == rb) pairs.push_back({i, a, b});
            }
    if (pairs.empty()) {
        v.message = "no node shares a dependency set across structures; vacuous pass";
        return v;
    }
    Rng rng(seed);
    StateSampler sampler(net);
    std::vector<double> fa(static_cast<std::size_t>(net.dim())), fb(static_cast<std::size_t>(net.dim()));
    for (int s = 0; s < n_samples; ++s) {
        NetworkState X = sampler.mixed(rng);
        ++v.samples;
        for (const auto& p : pairs) {
            net.eval_field(p.a, X.x.data(), X.tau.data(), fa.data());
            net.eval_field(p.b, X.x.data(), X.tau.data(), fb.data());
            for (int c = 0; c < L.dims[static_cast<std::size_t>(p.node)]; ++c) {
                auto idx = static_cast<std::size_t>(L.flat_index(p.node, c));
                if (std::fabs(fa[idx] - fb[idx]) > 1e-12) {
                    v.pass = false;
                    v.counterexample = X;
                    v.message = "node " + std::to_string(p.node) + " has equal dependency sets under '" + net.structure_name(p.a) + "' and '" + net.structure_name(p.b) + "' but different fields";
                    return v;
                }
            }
        }
    }
    v.message = "no counterexample in " + std::to_string(v.samples) + " samples";
    return v;
}

}  // namespace asynet
