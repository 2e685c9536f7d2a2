#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asynet/expr.hpp"

namespace asynet {

inline constexpr double kDefaultEpsEq = 1e-9;

struct Factor {
    enum class Kind { Interval, RealLine, Circle } kind = Kind::RealLine;
    double lo = 0.0;
    double hi = 0.0;

    static Factor interval(double lo, double hi);
    static Factor real_line() { return Factor{}; }
    static Factor circle() { return Factor{Kind::Circle, 0.0, 0.0}; }
};

struct NodeSpec {
    std::string name;
    std::vector<Factor> factors;
    int constraint_count = 0;  // p_i
};

// k x (k+1) matrix: column 0 is the constraint index, column j+1 says
// whether node i depends on node j.
class ConnectionStructure {
public:
    ConnectionStructure() = default;
    explicit ConnectionStructure(int k);
    explicit ConnectionStructure(const std::vector<std::vector<int>>& rows);

    int k() const { return k_; }
    int constraint(int i) const { return at(i, 0); }
    bool depends(int i, int j) const { return at(i, j + 1) != 0; }
    int at(int i, int col) const { return data_[static_cast<std::size_t>(i * (k_ + 1) + col)]; }

    void set_constraint(int i, int ell);
    void set_edge(int i, int j, bool on = true);

    std::vector<std::vector<int>> rows() const;
    bool empty() const;  // the empty structure: no constraints, no edges
    bool operator==(const ConnectionStructure& o) const { return k_ == o.k_ && data_ == o.data_; }
    bool operator!=(const ConnectionStructure& o) const { return !(*this == o); }
    bool operator<(const ConnectionStructure& o) const { return k_ != o.k_ ? k_ < o.k_ : data_ < o.data_; }
    std::string str() const;

private:
    int k_ = 0;
    std::vector<int> data_;
};

struct ConstraintSpec {
    int node = 0;
    int index = 1;                      // ell in 1..p_i
    Predicate region;                   // W_i^ell, strict inequalities only
    std::vector<int> frozen;            // node-local coordinate indices
};

struct VectorFieldSpec {
    std::vector<Expr> coords;           // one per flat state coordinate
    std::vector<int> clock_rates;       // one per clock, each 0 or 1
};

struct ClockSpec {
    std::string name;
    bool reset_on_start = false;        // restart from 0 when its rate turns 0 -> 1
};

struct EventRule {
    Predicate when;
    std::string target;
};

struct EventMapSpec {
    std::vector<EventRule> rules;
    std::string default_target;
};

struct TerminationSpec {
    std::vector<Predicate> targets;          // per node, F_i
    std::vector<Predicate> initialization;   // per node, I_i (optional)
};

struct NetworkSpec {
    std::string name;
    std::vector<NodeSpec> nodes;
    std::vector<std::string> structure_names;
    std::vector<ConnectionStructure> structures;
    std::map<std::string, VectorFieldSpec> fields;
    EventMapSpec events;
    std::vector<ConstraintSpec> constraints;
    std::vector<ClockSpec> clocks;
    std::map<std::string, double> params;
    std::optional<TerminationSpec> termination;
    std::map<std::string, std::string> metadata;
};

struct NetworkState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> tau;
    std::map<int, double> latched;      // flat coordinate -> latch value
    std::vector<int> frozen_nodes;      // nodes stopped at an interval endpoint (sorted)

    bool node_frozen(int i) const;
    bool operator==(const NetworkState& o) const = default;
};

struct Derivative {
    std::vector<double> dx;
    std::vector<double> dtau;
};

// Immutable compiled network. Construction never throws on structural
// problems; those are reported by validate_network.
class Network {
public:
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    const Layout& layout() const { return layout_; }
    int node_count() const { return static_cast<int>(spec_.nodes.size()); }
    int dim() const { return layout_.total_dim(); }
    int clock_count() const { return static_cast<int>(spec_.clocks.size()); }
    int structure_count() const { return static_cast<int>(spec_.structures.size()); }
    int node_of(int flat) const { return node_of_[static_cast<std::size_t>(flat)]; }
    const Factor& factor_of(int flat) const;
    int structure_index(const std::string& name) const;  // -1 if unknown
    const std::string& structure_name(int a) const { return spec_.structure_names[static_cast<std::size_t>(a)]; }
    const ConnectionStructure& structure(int a) const { return spec_.structures[static_cast<std::size_t>(a)]; }
    const ConstraintSpec* constraint_spec(int node, int ell) const;
    std::vector<int> frozen_coords(int a) const;  // flat coordinates frozen by structure a

    bool has_field(int a) const;
    const std::vector<int>& clock_rates(int a) const;

    // Event map: index of the selected structure.
    int eval_event_map(const double* x, const double* tau, double eps_eq = kDefaultEpsEq) const;
    int eval_event_map(const NetworkState& s, double eps_eq = kDefaultEpsEq) const;
    // Per-rule predicate values (for partition checks).
    std::vector<bool> eval_rules(const double* x, const double* tau, double eps_eq = kDefaultEpsEq) const;

    // Raw field of structure a (no latch or boundary handling).
    void eval_field(int a, const double* x, const double* tau, double* dx) const;
    // Field including latch/frozen-node rules.
    Derivative eval_field(int a, const NetworkState& s, double eps_eq = kDefaultEpsEq) const;
    Derivative eval_network_field(const NetworkState& s, double eps_eq = kDefaultEpsEq) const;

    // Guard atoms across all rules.
    int atom_count() const { return static_cast<int>(atoms_.size()); }
    const Atom& atom(int k) const { return atoms_[static_cast<std::size_t>(k)].atom; }
    double atom_value(int k, const double* x, const double* tau) const;
    int atom_rule(int k) const { return atoms_[static_cast<std::size_t>(k)].first_rule; }
    // Clock-only atoms of the form tau[c] - K: (clock, K).
    std::optional<std::pair<int, double>> atom_clock_threshold(int k) const;
    // Equality atom that can be satisfied by setting one state coordinate:
    // returns the coordinate; snap_atom writes the snapped value.
    std::optional<int> atom_latch_coord(int k) const;
    bool snap_atom(int k, std::vector<double>& x, const std::vector<double>& tau) const;

    bool termination_reached(const double* x, const double* tau, double eps_eq = kDefaultEpsEq) const;

    NetworkState make_state(std::vector<double> x, std::vector<double> tau = {}, double t = 0.0) const;
    std::vector<std::string> compile_errors() const { return compile_errors_; }
    std::vector<std::string> coordinate_labels() const;

    // Compiled predicate tree over atom indices.
    struct CPred {
        PredNode::Kind kind = PredNode::Kind::True;
        int atom = -1;
        std::vector<CPred> kids;
    };
    bool eval_pred(const CPred& p, const double* x, const double* tau, double eps_eq, std::vector<double>& cache, std::vector<char>& have) const;
    const CPred& rule_pred(int r) const { return rule_preds_[static_cast<std::size_t>(r)]; }
    int rule_target(int r) const { return rule_targets_[static_cast<std::size_t>(r)]; }
    int default_target() const { return default_target_; }
    CPred compile_pred(const Predicate& p, std::vector<Program>& programs, std::vector<Cmp>& cmps) const;

private:
    struct CompiledAtom {
        Atom atom;
        Program g;
        int first_rule = -1;
        std::optional<std::pair<int, double>> clock_threshold;
        std::optional<int> latch_coord;
        std::optional<Program> latch_value;  // value for the latch coordinate
    };
    struct CompiledField {
        bool ok = false;
        std::vector<Program> coords;
        std::vector<int> rates;
    };

    NetworkSpec spec_;
    Layout layout_;
    std::vector<int> node_of_;
    std::vector<CompiledField> fields_;
    std::vector<CompiledAtom> atoms_;
    std::vector<CPred> rule_preds_;
    std::vector<int> rule_targets_;
    int default_target_ = -1;
    std::vector<CPred> term_preds_;
    std::vector<Program> term_programs_;
    std::vector<Cmp> term_cmps_;
    std::vector<std::string> compile_errors_;
    std::vector<std::vector<int>> frozen_coords_;

    void compile();
    int intern_atom(const Atom& a, int rule);
    CPred compile_rule_pred(const PredNode& n, int rule);
};

// Structural diagnostics; empty means well formed.
std::vector<std::string> validate_network(const Network& net);

}  // namespace asynet
