#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asynet {

// Raised while evaluating an expression (e.g. division by zero) or when
// an expression references something the network does not declare.
class ExpressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Syntax error in expression or predicate text; line/column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line;
    std::size_t column;
};

enum class ExprOp { Const, State, Clock, Param, Neg, Add, Sub, Mul, Div, Call };
enum class Func { Sin, Cos, Abs, Min, Max, CircDist };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op = ExprOp::Const;
    double value = 0.0;
    int node = 0;
    int coord = 0;
    std::string name;
    Func func = Func::Sin;
    std::vector<ExprPtr> args;
};

class Expr {
public:
    Expr();
    explicit Expr(ExprPtr root);
    Expr(double v);  // NOLINT(google-explicit-constructor)

    static Expr parse(std::string_view text);
    static Expr constant(double v);
    static Expr state(int node, int coord);
    static Expr clock(const std::string& name);
    static Expr param(const std::string& name);
    static Expr call(Func f, std::vector<Expr> args);

    const ExprNode& node() const { return *root_; }
    const ExprPtr& ptr() const { return root_; }
    std::string str() const;

    bool is_constant() const;  // no state, clock or param references
    bool references_state() const;
    bool references_clock() const;
    std::set<std::pair<int, int>> state_refs() const;
    std::set<std::string> clock_refs() const;
    std::set<std::string> param_refs() const;

    // Rewrites leaves; the callback returns nullptr to keep a leaf unchanged.
    Expr transform(const std::function<ExprPtr(const ExprNode&)>& leaf) const;
    Expr remap_nodes(const std::function<int(int)>& node_map) const;
    Expr rename_clocks(const std::map<std::string, std::string>& names) const;
    Expr rename_params(const std::map<std::string, std::string>& names) const;
    // Replaces params by their values and folds constant subtrees.
    Expr bind_params(const std::map<std::string, double>& values) const;
    Expr fold() const;

private:
    ExprPtr root_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr abs(const Expr& a);
Expr min(const Expr& a, const Expr& b);
Expr max(const Expr& a, const Expr& b);
Expr circ_dist(const Expr& a, const Expr& b);

// Shortest angular distance between two angles in radians, in [0, pi].
double circular_distance(double a, double b);
// sin with exact zeros at representable multiples of pi.
double sin_snapped(double x);
std::string format_number(double v);

// Where the compiled program finds state and clock values.
struct Layout {
    std::vector<int> offsets;  // per node, into the flat state vector
    std::vector<int> dims;     // per node
    std::vector<std::string> clocks;

    int flat_index(int node, int coord) const;
    int clock_index(const std::string& name) const;
    int total_dim() const;
};

// Stack-machine form of an expression with params folded in.
class Program {
public:
    Program() = default;
    static Program compile(const Expr& e, const Layout& layout, const std::map<std::string, double>& params);

    double eval(const double* x, const double* tau) const;
    const std::vector<int>& state_indices() const { return state_idx_; }
    const std::vector<int>& clock_indices() const { return clock_idx_; }
    bool empty() const { return code_.empty(); }

private:
    enum class Code : unsigned char { Const, State, Clock, Neg, Add, Sub, Mul, Div, Sin, Cos, Abs, Min, Max, CircDist };
    struct Ins {
        Code code;
        int idx;
        double v;
    };
    void emit(const ExprNode& n, const Layout& layout, const std::map<std::string, double>& params, int depth);

    std::vector<Ins> code_;
    int max_depth_ = 0;
    std::vector<int> state_idx_;
    std::vector<int> clock_idx_;
};

enum class Cmp { Lt, Le, Eq, Ge, Gt };
std::string_view cmp_symbol(Cmp c);

struct Atom {
    Expr lhs;
    Cmp cmp = Cmp::Eq;
    Expr rhs;
    Expr g() const { return lhs - rhs; }
    std::string str() const;
};

struct PredNode;
using PredPtr = std::shared_ptr<const PredNode>;

struct PredNode {
    enum class Kind { True, False, Atom, And, Or, Not } kind = Kind::True;
    Atom atom;
    std::vector<PredPtr> kids;
};

class Predicate {
public:
    Predicate();
    explicit Predicate(PredPtr root);

    static Predicate parse(std::string_view text);
    static Predicate always();
    static Predicate never();
    static Predicate atom(Expr lhs, Cmp cmp, Expr rhs);

    const PredNode& node() const { return *root_; }
    std::string str() const;

    std::vector<Atom> atoms() const;  // in left-to-right order
    Predicate transform_exprs(const std::function<Expr(const Expr&)>& f) const;
    bool is_true_literal() const { return root_->kind == PredNode::Kind::True; }

private:
    PredPtr root_;
};

Predicate operator&&(const Predicate& a, const Predicate& b);
Predicate operator||(const Predicate& a, const Predicate& b);
Predicate operator!(const Predicate& a);

// Atom truth under the equality tolerance.
bool atom_holds(Cmp c, double g, double eps_eq);

}  // namespace asynet
