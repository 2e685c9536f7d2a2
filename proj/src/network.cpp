#include "asynet/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asynet {

Factor Factor::interval(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("interval factor requires lo < hi");
    return Factor{Kind::Interval, lo, hi};
}

// ---------------------------------------------------------------- ConnectionStructure

ConnectionStructure::ConnectionStructure(int k) : k_(k), data_(static_cast<std::size_t>(k * (k + 1)), 0) {
    if (k < 1) throw std::invalid_argument("connection structure needs at least one node");
}

ConnectionStructure::ConnectionStructure(const std::vector<std::vector<int>>& rows) : ConnectionStructure(static_cast<int>(rows.size())) {
    for (int i = 0; i < k_; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (static_cast<int>(r.size()) != k_ + 1) throw std::invalid_argument("connection structure rows must have k+1 entries");
        if (r[0] < 0) throw std::invalid_argument("constraint index must be non-negative");
        set_constraint(i, r[0]);
        for (int j = 0; j < k_; ++j) {
            int v = r[static_cast<std::size_t>(j + 1)];
            if (v != 0 && v != 1) throw std::invalid_argument("adjacency entries must be 0 or 1");
            if (v) set_edge(i, j);
        }
    }
}

void ConnectionStructure::set_constraint(int i, int ell) {
    if (ell < 0) throw std::invalid_argument("constraint index must be non-negative");
    data_[static_cast<std::size_t>(i * (k_ + 1))] = ell;
}

void ConnectionStructure::set_edge(int i, int j, bool on) {
    if (i == j && on) throw std::invalid_argument("self-loop: node " + std::to_string(i) + " cannot depend on itself");
    data_[static_cast<std::size_t>(i * (k_ + 1) + j + 1)] = on ? 1 : 0;
}

std::vector<std::vector<int>> ConnectionStructure::rows() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k_));
    for (int i = 0; i < k_; ++i)
        for (int c = 0; c <= k_; ++c) out[static_cast<std::size_t>(i)].push_back(at(i, c));
    return out;
}

bool ConnectionStructure::empty() const {
    return std::all_of(data_.begin(), data_.end(), [](int v) { return v == 0; });
}

std::string ConnectionStructure::str() const {
    std::ostringstream os;
    for (int i = 0; i < k_; ++i) {
        if (i) os << "; ";
        os << at(i, 0) << " |";
        for (int j = 0; j < k_; ++j) os << ' ' << at(i, j + 1);
    }
    return os.str();
}

bool NetworkState::node_frozen(int i) const { return std::binary_search(frozen_nodes.begin(), frozen_nodes.end(), i); }

// ---------------------------------------------------------------- Network

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) { compile(); }

const Factor& Network::factor_of(int flat) const {
    int node = node_of(flat);
    return spec_.nodes[static_cast<std::size_t>(node)].factors[static_cast<std::size_t>(flat - layout_.offsets[static_cast<std::size_t>(node)])];
}

int Network::structure_index(const std::string& name) const {
    for (std::size_t a = 0; a < spec_.structure_names.size(); ++a)
        if (spec_.structure_names[a] == name) return static_cast<int>(a);
    return -1;
}

const ConstraintSpec* Network::constraint_spec(int node, int ell) const {
    for (const auto& c : spec_.constraints)
        if (c.node == node && c.index == ell) return &c;
    return nullptr;
}

std::vector<int> Network::frozen_coords(int a) const { return frozen_coords_[static_cast<std::size_t>(a)]; }

bool Network::has_field(int a) const { return fields_[static_cast<std::size_t>(a)].ok; }

const std::vector<int>& Network::clock_rates(int a) const {
    const auto& f = fields_[static_cast<std::size_t>(a)];
    if (!f.ok) throw std::logic_error("no vector field for structure '" + structure_name(a) + "'");
    return f.rates;
}

void Network::compile() {
    const int k = node_count();
    layout_ = Layout{};
    for (const auto& n : spec_.nodes) {
        layout_.offsets.push_back(layout_.total_dim());
        layout_.dims.push_back(static_cast<int>(n.factors.size()));
    }
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < layout_.dims[static_cast<std::size_t>(i)]; ++c) node_of_.push_back(i);
    for (const auto& c : spec_.clocks) layout_.clocks.push_back(c.name);

    const int n = dim();
    const int s = clock_count();
    fields_.assign(spec_.structures.size(), {});
    for (std::size_t a = 0; a < spec_.structures.size(); ++a) {
        const std::string& name = spec_.structure_names[a];
        auto it = spec_.fields.find(name);
        if (it == spec_.fields.end()) continue;
        const VectorFieldSpec& f = it->second;
        CompiledField cf;
        bool ok = true;
        if (static_cast<int>(f.coords.size()) != n) {
            compile_errors_.push_back("field for '" + name + "' has " + std::to_string(f.coords.size()) + " coordinates, state has " + std::to_string(n));
            ok = false;
        }
        if (static_cast<int>(f.clock_rates.size()) != s) {
            compile_errors_.push_back("field for '" + name + "' has " + std::to_string(f.clock_rates.size()) + " clock rates, network declares " + std::to_string(s) + " clocks");
            ok = false;
        }
        for (int r : f.clock_rates)
            if (r != 0 && r != 1) {
                compile_errors_.push_back("field for '" + name + "' has clock rate " + std::to_string(r) + " (must be 0 or 1)");
                ok = false;
            }
        if (ok) {
            try {
                for (const auto& e : f.coords) cf.coords.push_back(Program::compile(e, layout_, spec_.params));
                cf.rates = f.clock_rates;
                cf.ok = true;
            } catch (const ExpressionError& e) {
                compile_errors_.push_back("field for '" + name + "': " + e.what());
            }
        }
        fields_[a] = std::move(cf);
    }

    for (std::size_t r = 0; r < spec_.events.rules.size(); ++r) {
        const auto& rule = spec_.events.rules[r];
        try {
            rule_preds_.push_back(compile_rule_pred(rule.when.node(), static_cast<int>(r)));
        } catch (const ExpressionError& e) {
            compile_errors_.push_back("event rule " + std::to_string(r) + ": " + e.what());
            rule_preds_.push_back(CPred{PredNode::Kind::False, -1, {}});
        }
        rule_targets_.push_back(structure_index(rule.target));
    }
    default_target_ = structure_index(spec_.events.default_target);

    if (spec_.termination) {
        for (const auto& p : spec_.termination->targets) {
            try {
                term_preds_.push_back(compile_pred(p, term_programs_, term_cmps_));
            } catch (const ExpressionError& e) {
                compile_errors_.push_back(std::string("termination: ") + e.what());
                term_preds_.push_back(CPred{PredNode::Kind::False, -1, {}});
            }
        }
    }

    frozen_coords_.assign(spec_.structures.size(), {});
    for (std::size_t a = 0; a < spec_.structures.size(); ++a) {
        const auto& st = spec_.structures[a];
        if (st.k() != k) continue;
        for (int i = 0; i < k; ++i) {
            int ell = st.constraint(i);
            if (ell == 0) continue;
            const ConstraintSpec* c = constraint_spec(i, ell);
            if (!c) continue;
            for (int lc : c->frozen)
                if (lc >= 0 && lc < layout_.dims[static_cast<std::size_t>(i)]) frozen_coords_[a].push_back(layout_.offsets[static_cast<std::size_t>(i)] + lc);
        }
    }
}

int Network::intern_atom(const Atom& a, int rule) {
    std::string key = a.str();
    for (std::size_t k = 0; k < atoms_.size(); ++k)
        if (atoms_[k].atom.str() == key) return static_cast<int>(k);
    CompiledAtom ca;
    ca.atom = a;
    ca.first_rule = rule;
    ca.g = Program::compile(a.g(), layout_, spec_.params);
    Expr lhs = a.lhs.bind_params(spec_.params);
    Expr rhs = a.rhs.bind_params(spec_.params);
    if (lhs.node().op == ExprOp::Clock && rhs.node().op == ExprOp::Const) {
        ca.clock_threshold = std::make_pair(layout_.clock_index(lhs.node().name), rhs.node().value);
    } else if (rhs.node().op == ExprOp::Clock && lhs.node().op == ExprOp::Const) {
        ca.clock_threshold = std::make_pair(layout_.clock_index(rhs.node().name), lhs.node().value);
    }
    if (a.cmp == Cmp::Eq) {
        auto try_side = [&](const Expr& var, const Expr& other) {
            if (ca.latch_coord || var.node().op != ExprOp::State) return;
            std::pair<int, int> ref{var.node().node, var.node().coord};
            if (other.state_refs().count(ref)) return;
            ca.latch_coord = layout_.flat_index(ref.first, ref.second);
            ca.latch_value = Program::compile(other, layout_, spec_.params);
        };
        try_side(lhs, rhs);
        try_side(rhs, lhs);
    }
    atoms_.push_back(std::move(ca));
    return static_cast<int>(atoms_.size() - 1);
}

Network::CPred Network::compile_rule_pred(const PredNode& n, int rule) {
    CPred c;
    c.kind = n.kind;
    if (n.kind == PredNode::Kind::Atom) c.atom = intern_atom(n.atom, rule);
    for (const auto& kid : n.kids) c.kids.push_back(compile_rule_pred(*kid, rule));
    return c;
}

Network::CPred Network::compile_pred(const Predicate& p, std::vector<Program>& programs, std::vector<Cmp>& cmps) const {
    std::function<CPred(const PredNode&)> walk = [&](const PredNode& n) {
        CPred c;
        c.kind = n.kind;
        if (n.kind == PredNode::Kind::Atom) {
            programs.push_back(Program::compile(n.atom.g(), layout_, spec_.params));
            cmps.push_back(n.atom.cmp);
            c.atom = static_cast<int>(programs.size() - 1);
        }
        for (const auto& kid : n.kids) c.kids.push_back(walk(*kid));
        return c;
    };
    return walk(p.node());
}

bool Network::eval_pred(const CPred& p, const double* x, const double* tau, double eps_eq, std::vector<double>& cache, std::vector<char>& have) const {
    switch (p.kind) {
        case PredNode::Kind::True: return true;
        case PredNode::Kind::False: return false;
        case PredNode::Kind::Atom: {
            auto k = static_cast<std::size_t>(p.atom);
            if (!have[k]) {
                cache[k] = atoms_[k].g.eval(x, tau);
                have[k] = 1;
            }
            return atom_holds(atoms_[k].atom.cmp, cache[k], eps_eq);
        }
        case PredNode::Kind::Not: return !eval_pred(p.kids[0], x, tau, eps_eq, cache, have);
        case PredNode::Kind::And:
            for (const auto& kid : p.kids)
                if (!eval_pred(kid, x, tau, eps_eq, cache, have)) return false;
            return true;
        case PredNode::Kind::Or:
            for (const auto& kid : p.kids)
                if (eval_pred(kid, x, tau, eps_eq, cache, have)) return true;
            return false;
    }
    return false;
}

int Network::eval_event_map(const double* x, const double* tau, double eps_eq) const {
    std::vector<double> cache(atoms_.size());
    std::vector<char> have(atoms_.size(), 0);
    for (std::size_t r = 0; r < rule_preds_.size(); ++r) {
        bool hit;
        try {
            hit = eval_pred(rule_preds_[r], x, tau, eps_eq, cache, have);
        } catch (const ExpressionError& e) {
            throw ExpressionError("event rule " + std::to_string(r) + ": " + e.what());
        }
        if (hit) {
            if (rule_targets_[r] < 0) throw std::logic_error("event rule " + std::to_string(r) + " targets unknown structure '" + spec_.events.rules[r].target + "'");
            return rule_targets_[r];
        }
    }
    if (default_target_ < 0) throw std::logic_error("event map default targets unknown structure '" + spec_.events.default_target + "'");
    return default_target_;
}

int Network::eval_event_map(const NetworkState& s, double eps_eq) const {
    if (static_cast<int>(s.x.size()) != dim() || static_cast<int>(s.tau.size()) != clock_count()) throw std::invalid_argument("state dimensions do not match network");
    return eval_event_map(s.x.data(), s.tau.data(), eps_eq);
}

std::vector<bool> Network::eval_rules(const double* x, const double* tau, double eps_eq) const {
    std::vector<double> cache(atoms_.size());
    std::vector<char> have(atoms_.size(), 0);
    std::vector<bool> out;
    for (const auto& p : rule_preds_) out.push_back(eval_pred(p, x, tau, eps_eq, cache, have));
    return out;
}

void Network::eval_field(int a, const double* x, const double* tau, double* dx) const {
    const auto& f = fields_[static_cast<std::size_t>(a)];
    if (!f.ok) throw std::logic_error("no vector field for structure '" + structure_name(a) + "'");
    for (std::size_t c = 0; c < f.coords.size(); ++c) dx[c] = f.coords[c].eval(x, tau);
}

Derivative Network::eval_field(int a, const NetworkState& s, double eps_eq) const {
    Derivative d;
    d.dx.resize(static_cast<std::size_t>(dim()));
    eval_field(a, s.x.data(), s.tau.data(), d.dx.data());
    const auto& rates = clock_rates(a);
    d.dtau.assign(rates.begin(), rates.end());
    for (int i : s.frozen_nodes) {
        int off = layout_.offsets[static_cast<std::size_t>(i)];
        for (int c = 0; c < layout_.dims[static_cast<std::size_t>(i)]; ++c) d.dx[static_cast<std::size_t>(off + c)] = 0.0;
    }
    const auto& frozen = frozen_coords_[static_cast<std::size_t>(a)];
    for (const auto& [coord, value] : s.latched) {
        auto& v = d.dx[static_cast<std::size_t>(coord)];
        if (std::fabs(v) <= eps_eq || std::find(frozen.begin(), frozen.end(), coord) != frozen.end()) v = 0.0;
    }
    return d;
}

Derivative Network::eval_network_field(const NetworkState& s, double eps_eq) const { return eval_field(eval_event_map(s, eps_eq), s, eps_eq); }

double Network::atom_value(int k, const double* x, const double* tau) const { return atoms_[static_cast<std::size_t>(k)].g.eval(x, tau); }

std::optional<std::pair<int, double>> Network::atom_clock_threshold(int k) const { return atoms_[static_cast<std::size_t>(k)].clock_threshold; }

std::optional<int> Network::atom_latch_coord(int k) const { return atoms_[static_cast<std::size_t>(k)].latch_coord; }

bool Network::snap_atom(int k, std::vector<double>& x, const std::vector<double>& tau) const {
    const auto& a = atoms_[static_cast<std::size_t>(k)];
    if (!a.latch_coord) return false;
    x[static_cast<std::size_t>(*a.latch_coord)] = a.latch_value->eval(x.data(), tau.data());
    return true;
}

bool Network::termination_reached(const double* x, const double* tau, double eps_eq) const {
    if (term_preds_.empty()) return false;
    std::function<bool(const CPred&)> walk = [&](const CPred& p) -> bool {
        switch (p.kind) {
            case PredNode::Kind::True: return true;
            case PredNode::Kind::False: return false;
            case PredNode::Kind::Atom: return atom_holds(term_cmps_[static_cast<std::size_t>(p.atom)], term_programs_[static_cast<std::size_t>(p.atom)].eval(x, tau), eps_eq);
            case PredNode::Kind::Not: return !walk(p.kids[0]);
            case PredNode::Kind::And:
                for (const auto& k : p.kids)
                    if (!walk(k)) return false;
                return true;
            case PredNode::Kind::Or:
                for (const auto& k : p.kids)
                    if (walk(k)) return true;
                return false;
        }
        return false;
    };
    return std::all_of(term_preds_.begin(), term_preds_.end(), walk);
}

NetworkState Network::make_state(std::vector<double> x, std::vector<double> tau, double t) const {
    if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("state has " + std::to_string(x.size()) + " coordinates, network has " + std::to_string(dim()));
    if (tau.empty()) tau.assign(static_cast<std::size_t>(clock_count()), 0.0);
    if (static_cast<int>(tau.size()) != clock_count()) throw std::invalid_argument("clock vector has wrong length");
    for (double v : tau)
        if (v < 0) throw std::invalid_argument("clocks must be non-negative");
    for (int c = 0; c < dim(); ++c) {
        const Factor& f = factor_of(c);
        double v = x[static_cast<std::size_t>(c)];
        if (f.kind == Factor::Kind::Interval && (v < f.lo || v > f.hi)) throw std::invalid_argument("coordinate " + std::to_string(c) + " outside its interval");
    }
    NetworkState s;
    s.t = t;
    s.x = std::move(x);
    s.tau = std::move(tau);
    return s;
}

std::vector<std::string> Network::coordinate_labels() const {
    std::vector<std::string> out;
    for (int i = 0; i < node_count(); ++i) {
        const auto& nd = spec_.nodes[static_cast<std::size_t>(i)];
        std::string base = nd.name.empty() ? "N" + std::to_string(i + 1) : nd.name;
        if (nd.factors.size() == 1) {
            out.push_back(base);
        } else {
            for (std::size_t c = 0; c < nd.factors.size(); ++c) out.push_back(base + "[" + std::to_string(c) + "]");
        }
    }
    return out;
}

// ---------------------------------------------------------------- validation

namespace {
bool only_strict(const PredNode& n) {
    if (n.kind == PredNode::Kind::Atom) return n.atom.cmp == Cmp::Lt || n.atom.cmp == Cmp::Gt;
    if (n.kind == PredNode::Kind::Not) return false;
    for (const auto& k : n.kids)
        if (!only_strict(*k)) return false;
    return true;
}
}  // namespace

std::vector<std::string> validate_network(const Network& net) {
    std::vector<std::string> out = net.compile_errors();
    const auto& spec = net.spec();
    const int k = net.node_count();
    if (k < 1) out.push_back("network has no nodes");
    for (int i = 0; i < k; ++i) {
        const auto& nd = spec.nodes[static_cast<std::size_t>(i)];
        if (nd.factors.empty()) out.push_back("node " + std::to_string(i) + " has no coordinates");
        for (const auto& f : nd.factors)
            if (f.kind == Factor::Kind::Interval && !(f.lo < f.hi)) out.push_back("node " + std::to_string(i) + " has an empty interval");
    }
    std::set<std::string> names;
    for (std::size_t a = 0; a < spec.structures.size(); ++a) {
        const std::string& name = spec.structure_names[a];
        if (!names.insert(name).second) out.push_back("duplicate structure name '" + name + "'");
        const auto& st = spec.structures[a];
        if (st.k() != k) {
            out.push_back("structure '" + name + "' has " + std::to_string(st.k()) + " nodes, network has " + std::to_string(k));
            continue;
        }
        if (!spec.fields.count(name)) out.push_back("missing field for " + name);
        for (int i = 0; i < k; ++i) {
            int ell = st.constraint(i);
            if (ell > spec.nodes[static_cast<std::size_t>(i)].constraint_count)
                out.push_back("structure '" + name + "' uses constraint " + std::to_string(ell) + " on node " + std::to_string(i) + " but only " + std::to_string(spec.nodes[static_cast<std::size_t>(i)].constraint_count) + " declared");
            if (ell > 0 && !net.constraint_spec(i, ell)) out.push_back("structure '" + name + "' uses constraint " + std::to_string(ell) + " on node " + std::to_string(i) + " with no constraint spec");
        }
        bool targeted = spec.events.default_target == name;
        for (const auto& r : spec.events.rules) targeted |= r.target == name;
        if (!targeted) out.push_back("structure '" + name + "' is not the target of any event rule");
    }
    if (spec.structures.size() != spec.structure_names.size()) out.push_back("structure names and matrices differ in count");
    for (std::size_t a = 0; a < spec.structures.size(); ++a)
        for (std::size_t b = a + 1; b < spec.structures.size(); ++b)
            if (spec.structures[a] == spec.structures[b]) out.push_back("structures '" + spec.structure_names[a] + "' and '" + spec.structure_names[b] + "' are identical");
    for (const auto& [fname, f] : spec.fields)
        if (net.structure_index(fname) < 0) out.push_back("field given for unknown structure '" + fname + "'");
    for (std::size_t r = 0; r < spec.events.rules.size(); ++r)
        if (net.structure_index(spec.events.rules[r].target) < 0) out.push_back("event rule " + std::to_string(r) + " targets unknown structure '" + spec.events.rules[r].target + "'");
    if (net.structure_index(spec.events.default_target) < 0) out.push_back("event map default '" + spec.events.default_target + "' is not a structure");
    std::set<std::string> clock_names;
    for (const auto& c : spec.clocks)
        if (!clock_names.insert(c.name).second) out.push_back("duplicate clock '" + c.name + "'");
    for (const auto& c : spec.constraints) {
        std::string tag = "constraint (" + std::to_string(c.node) + ", " + std::to_string(c.index) + ")";
        if (c.node < 0 || c.node >= k) {
            out.push_back(tag + " names an unknown node");
            continue;
        }
        int dims = static_cast<int>(spec.nodes[static_cast<std::size_t>(c.node)].factors.size());
        if (c.index < 1 || c.index > spec.nodes[static_cast<std::size_t>(c.node)].constraint_count) out.push_back(tag + " index outside 1..p_i");
        if (c.frozen.empty()) out.push_back(tag + " freezes no coordinates");
        for (int fc : c.frozen)
            if (fc < 0 || fc >= dims) out.push_back(tag + " freezes unknown coordinate " + std::to_string(fc));
        if (!only_strict(c.region.node())) out.push_back(tag + " region must use strict inequalities only");
        for (const auto& a : c.region.atoms()) {
            for (const auto& [node, coord] : a.g().state_refs())
                if (node != c.node) out.push_back(tag + " region references another node");
            if (a.g().references_clock()) out.push_back(tag + " region references a clock");
        }
    }
    if (spec.termination && static_cast<int>(spec.termination->targets.size()) != k) out.push_back("termination spec must give one target per node");
    return out;
}

}  // namespace asynet
