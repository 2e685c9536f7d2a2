#include "asynet/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace asynet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr make_const(double v) {
    ExprNode n;
    n.op = ExprOp::Const;
    n.value = v;
    return make(std::move(n));
}

ExprPtr make_binary(ExprOp op, ExprPtr a, ExprPtr b) {
    ExprNode n;
    n.op = op;
    n.args = {std::move(a), std::move(b)};
    return make(std::move(n));
}

std::string_view func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Abs: return "abs";
        case Func::Min: return "min";
        case Func::Max: return "max";
        case Func::CircDist: return "circ_dist";
    }
    return "?";
}

std::optional<Func> func_by_name(std::string_view s) {
    if (s == "sin") return Func::Sin;
    if (s == "cos") return Func::Cos;
    if (s == "abs") return Func::Abs;
    if (s == "min") return Func::Min;
    if (s == "max") return Func::Max;
    if (s == "circ_dist") return Func::CircDist;
    return std::nullopt;
}

int func_arity(Func f) {
    switch (f) {
        case Func::Sin:
        case Func::Cos:
        case Func::Abs: return 1;
        default: return 2;
    }
}

double apply_func(Func f, double a, double b) {
    switch (f) {
        case Func::Sin: return sin_snapped(a);
        case Func::Cos: return std::cos(a);
        case Func::Abs: return std::fabs(a);
        case Func::Min: return std::min(a, b);
        case Func::Max: return std::max(a, b);
        case Func::CircDist: return circular_distance(a, b);
    }
    return 0.0;
}

// ---------------------------------------------------------------- lexer

enum class Tok { End, Num, Ident, LBrack, RBrack, LParen, RParen, Comma, Plus, Minus, Star, Slash, Lt, Le, Eq, Ne, Ge, Gt, Bang, AndAnd, OrOr };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double num = 0.0;
    std::size_t pos = 0;
};

std::pair<std::size_t, std::size_t> line_col(std::string_view src, std::size_t pos) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < src.size(); ++i) {
        if (src[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg, std::size_t at) {
        auto [l, c] = line_col(s, at);
        throw ParseError(msg, l, c);
    };
    while (i < s.size()) {
        char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    j = k;
                    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                }
            }
            t.kind = Tok::Num;
            t.text = std::string(s.substr(i, j - i));
            auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.num);
            if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) fail("malformed number '" + t.text + "'", i);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else {
            auto two = s.substr(i, 2);
            if (two == "<=") { t.kind = Tok::Le; i += 2; }
            else if (two == ">=") { t.kind = Tok::Ge; i += 2; }
            else if (two == "==") { t.kind = Tok::Eq; i += 2; }
            else if (two == "!=") { t.kind = Tok::Ne; i += 2; }
            else if (two == "&&") { t.kind = Tok::AndAnd; i += 2; }
            else if (two == "||") { t.kind = Tok::OrOr; i += 2; }
            else {
                switch (ch) {
                    case '[': t.kind = Tok::LBrack; break;
                    case ']': t.kind = Tok::RBrack; break;
                    case '(': t.kind = Tok::LParen; break;
                    case ')': t.kind = Tok::RParen; break;
                    case ',': t.kind = Tok::Comma; break;
                    case '+': t.kind = Tok::Plus; break;
                    case '-': t.kind = Tok::Minus; break;
                    case '*': t.kind = Tok::Star; break;
                    case '/': t.kind = Tok::Slash; break;
                    case '<': t.kind = Tok::Lt; break;
                    case '>': t.kind = Tok::Gt; break;
                    case '=': t.kind = Tok::Eq; break;
                    case '!': t.kind = Tok::Bang; break;
                    default: fail(std::string("unexpected character '") + ch + "'", i);
                }
                ++i;
            }
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

    Expr parse_expr_only() {
        ExprPtr e = expr();
        expect_end();
        return Expr(e);
    }

    Predicate parse_pred_only() {
        PredPtr p = pred_or();
        expect_end();
        return Predicate(p);
    }

private:
    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::size_t farthest_pos_ = 0;
    std::string farthest_msg_;

    const Token& peek() const { return toks_[i_]; }
    bool at(Tok k) const { return toks_[i_].kind == k; }
    bool at_word(std::string_view w) const { return at(Tok::Ident) && toks_[i_].text == w; }
    const Token& take() { return toks_[i_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        auto [l, c] = line_col(src_, peek().pos);
        throw ParseError(msg, l, c);
    }

    void expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        ++i_;
    }

    void expect_end() {
        if (!at(Tok::End)) fail("unexpected trailing input");
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            ExprOp op = take().kind == Tok::Plus ? ExprOp::Add : ExprOp::Sub;
            lhs = make_binary(op, lhs, term());
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            ExprOp op = take().kind == Tok::Star ? ExprOp::Mul : ExprOp::Div;
            lhs = make_binary(op, lhs, unary());
        }
        return lhs;
    }

    ExprPtr unary() {
        if (at(Tok::Minus)) {
            ++i_;
            ExprNode n;
            n.op = ExprOp::Neg;
            n.args = {unary()};
            return make(std::move(n));
        }
        if (at(Tok::Plus)) {
            ++i_;
            return unary();
        }
        return primary();
    }

    int integer_index() {
        if (!at(Tok::Num)) fail("expected integer index");
        const Token& t = take();
        double v = t.num;
        if (v < 0 || v != std::floor(v) || t.text.find_first_of(".eE") != std::string::npos) {
            --i_;
            fail("index must be a non-negative integer");
        }
        return static_cast<int>(v);
    }

    ExprPtr primary() {
        if (at(Tok::Num)) return make_const(take().num);
        if (at(Tok::LParen)) {
            ++i_;
            ExprPtr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (!at(Tok::Ident)) fail("expected expression");
        std::string name = take().text;
        if (name == "x" && at(Tok::LBrack)) {
            ++i_;
            int node = integer_index();
            expect(Tok::RBrack, "']'");
            expect(Tok::LBrack, "'['");
            int coord = integer_index();
            expect(Tok::RBrack, "']'");
            return Expr::state(node, coord).ptr();
        }
        if (name == "tau" && at(Tok::LBrack)) {
            ++i_;
            if (!at(Tok::Ident)) fail("expected clock name");
            std::string clock = take().text;
            expect(Tok::RBrack, "']'");
            return Expr::clock(clock).ptr();
        }
        if (at(Tok::LParen)) {
            auto f = func_by_name(name);
            if (!f) {
                --i_;
                fail("unknown function '" + name + "'");
            }
            ++i_;
            std::vector<ExprPtr> args;
            if (!at(Tok::RParen)) {
                args.push_back(expr());
                while (at(Tok::Comma)) {
                    ++i_;
                    args.push_back(expr());
                }
            }
            if (static_cast<int>(args.size()) != func_arity(*f)) fail(std::string(func_name(*f)) + " expects " + std::to_string(func_arity(*f)) + " argument(s)");
            expect(Tok::RParen, "')'");
            ExprNode n;
            n.op = ExprOp::Call;
            n.func = *f;
            n.args = std::move(args);
            return make(std::move(n));
        }
        if (name == "pi") return make_const(std::numbers::pi);
        if (name == "and" || name == "or" || name == "not" || name == "true" || name == "false") {
            --i_;
            fail("keyword '" + name + "' cannot be used in an expression");
        }
        return Expr::param(name).ptr();
    }

    static PredPtr pnode(PredNode n) { return std::make_shared<const PredNode>(std::move(n)); }

    PredPtr pred_or() {
        std::vector<PredPtr> kids{pred_and()};
        while (at(Tok::OrOr) || at_word("or")) {
            ++i_;
            kids.push_back(pred_and());
        }
        if (kids.size() == 1) return kids.front();
        PredNode n;
        n.kind = PredNode::Kind::Or;
        n.kids = std::move(kids);
        return pnode(std::move(n));
    }

    PredPtr pred_and() {
        std::vector<PredPtr> kids{pred_unary()};
        while (at(Tok::AndAnd) || at_word("and")) {
            ++i_;
            kids.push_back(pred_unary());
        }
        if (kids.size() == 1) return kids.front();
        PredNode n;
        n.kind = PredNode::Kind::And;
        n.kids = std::move(kids);
        return pnode(std::move(n));
    }

    PredPtr pred_unary() {
        if (at(Tok::Bang) || at_word("not")) {
            ++i_;
            PredNode n;
            n.kind = PredNode::Kind::Not;
            n.kids = {pred_unary()};
            return pnode(std::move(n));
        }
        if (at_word("true")) {
            ++i_;
            return pnode(PredNode{});
        }
        if (at_word("false")) {
            ++i_;
            PredNode n;
            n.kind = PredNode::Kind::False;
            return pnode(std::move(n));
        }
        std::size_t save = i_;
        try {
            return comparison();
        } catch (const ParseError& e) {
            record_failure(e);
            if (toks_[save].kind != Tok::LParen) rethrow_farthest();
        }
        i_ = save + 1;
        try {
            PredPtr inner = pred_or();
            expect(Tok::RParen, "')'");
            return inner;
        } catch (const ParseError& e) {
            record_failure(e);
            rethrow_farthest();
        }
    }

    std::size_t pos_of(const ParseError& e) const {
        std::size_t line = 1, col = 1;
        for (std::size_t p = 0; p <= src_.size(); ++p) {
            if (line == e.line && col == e.column) return p;
            if (p < src_.size() && src_[p] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return src_.size();
    }

    void record_failure(const ParseError& e) {
        std::size_t p = pos_of(e);
        if (farthest_msg_.empty() || p >= farthest_pos_) {
            farthest_pos_ = p;
            farthest_msg_ = e.what();
        }
    }

    [[noreturn]] void rethrow_farthest() const {
        auto [l, c] = line_col(src_, farthest_pos_);
        std::string msg = farthest_msg_;
        auto cut = msg.find(" (line ");
        if (cut != std::string::npos) msg = msg.substr(0, cut);
        throw ParseError(msg, l, c);
    }

    PredPtr comparison() {
        ExprPtr lhs = expr();
        bool negate = false;
        Cmp c;
        switch (peek().kind) {
            case Tok::Lt: c = Cmp::Lt; break;
            case Tok::Le: c = Cmp::Le; break;
            case Tok::Eq: c = Cmp::Eq; break;
            case Tok::Ne: c = Cmp::Eq; negate = true; break;
            case Tok::Ge: c = Cmp::Ge; break;
            case Tok::Gt: c = Cmp::Gt; break;
            default: fail("expected comparison operator");
        }
        ++i_;
        ExprPtr rhs = expr();
        PredNode a;
        a.kind = PredNode::Kind::Atom;
        a.atom = Atom{Expr(lhs), c, Expr(rhs)};
        PredPtr p = pnode(std::move(a));
        if (!negate) return p;
        PredNode n;
        n.kind = PredNode::Kind::Not;
        n.kids = {p};
        return pnode(std::move(n));
    }
};

// ---------------------------------------------------------------- printing

int prec(const ExprNode& n) {
    switch (n.op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Const: return n.value < 0 || std::signbit(n.value) ? 3 : 4;
        default: return 4;
    }
}

void print(const ExprNode& n, std::string& out) {
    auto child = [&](const ExprNode& c, bool paren) {
        if (paren) out += '(';
        print(c, out);
        if (paren) out += ')';
    };
    switch (n.op) {
        case ExprOp::Const:
            out += format_number(n.value);
            return;
        case ExprOp::State:
            out += "x[" + std::to_string(n.node) + "][" + std::to_string(n.coord) + "]";
            return;
        case ExprOp::Clock:
            out += "tau[" + n.name + "]";
            return;
        case ExprOp::Param:
            out += n.name;
            return;
        case ExprOp::Neg:
            out += '-';
            child(*n.args[0], prec(*n.args[0]) <= 3);
            return;
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
        case ExprOp::Div: {
            int p = prec(n);
            child(*n.args[0], prec(*n.args[0]) < p);
            out += n.op == ExprOp::Add ? " + " : n.op == ExprOp::Sub ? " - " : n.op == ExprOp::Mul ? " * " : " / ";
            child(*n.args[1], prec(*n.args[1]) <= p);
            return;
        }
        case ExprOp::Call:
            out += func_name(n.func);
            out += '(';
            for (std::size_t k = 0; k < n.args.size(); ++k) {
                if (k) out += ", ";
                print(*n.args[k], out);
            }
            out += ')';
            return;
    }
}

int pred_prec(const PredNode& n) {
    switch (n.kind) {
        case PredNode::Kind::Or: return 1;
        case PredNode::Kind::And: return 2;
        case PredNode::Kind::Not: return 3;
        default: return 4;
    }
}

void print_pred(const PredNode& n, std::string& out) {
    switch (n.kind) {
        case PredNode::Kind::True: out += "true"; return;
        case PredNode::Kind::False: out += "false"; return;
        case PredNode::Kind::Atom: out += n.atom.str(); return;
        case PredNode::Kind::Not:
            out += "not (";
            print_pred(*n.kids[0], out);
            out += ')';
            return;
        case PredNode::Kind::And:
        case PredNode::Kind::Or: {
            int p = pred_prec(n);
            for (std::size_t k = 0; k < n.kids.size(); ++k) {
                if (k) out += n.kind == PredNode::Kind::And ? " and " : " or ";
                bool paren = pred_prec(*n.kids[k]) <= p;
                if (paren) out += '(';
                print_pred(*n.kids[k], out);
                if (paren) out += ')';
            }
            return;
        }
    }
}

void collect(const ExprNode& n, const std::function<void(const ExprNode&)>& f) {
    f(n);
    for (const auto& a : n.args) collect(*a, f);
}

ExprPtr transform_node(const ExprPtr& p, const std::function<ExprPtr(const ExprNode&)>& leaf) {
    if (p->args.empty()) {
        ExprPtr r = leaf(*p);
        return r ? r : p;
    }
    ExprNode n = *p;
    bool changed = false;
    for (auto& a : n.args) {
        ExprPtr na = transform_node(a, leaf);
        changed |= na != a;
        a = na;
    }
    return changed ? make(std::move(n)) : p;
}

ExprPtr fold_node(const ExprPtr& p) {
    if (p->args.empty()) return p;
    ExprNode n = *p;
    bool all_const = true;
    for (auto& a : n.args) {
        a = fold_node(a);
        all_const &= a->op == ExprOp::Const;
    }
    if (!all_const) return make(std::move(n));
    double a = n.args[0]->value;
    double b = n.args.size() > 1 ? n.args[1]->value : 0.0;
    switch (n.op) {
        case ExprOp::Neg: return make_const(-a);
        case ExprOp::Add: return make_const(a + b);
        case ExprOp::Sub: return make_const(a - b);
        case ExprOp::Mul: return make_const(a * b);
        case ExprOp::Div:
            if (b == 0.0) return make(std::move(n));
            return make_const(a / b);
        case ExprOp::Call: return make_const(apply_func(n.func, a, b));
        default: return make(std::move(n));
    }
}

}  // namespace

ParseError::ParseError(const std::string& msg, std::size_t l, std::size_t c)
    : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) + ")"), line(l), column(c) {}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double circular_distance(double a, double b) {
    double d = std::fmod(std::fabs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

double sin_snapped(double x) {
    double r = std::remainder(x, kTwoPi);
    if (r == std::numbers::pi || r == -std::numbers::pi) return 0.0;
    return std::sin(x);
}

// ---------------------------------------------------------------- Expr

Expr::Expr() : root_(make_const(0.0)) {}
Expr::Expr(ExprPtr root) : root_(std::move(root)) {}
Expr::Expr(double v) : root_(make_const(v)) {}

Expr Expr::parse(std::string_view text) { return Parser(text).parse_expr_only(); }
Expr Expr::constant(double v) { return Expr(make_const(v)); }

Expr Expr::state(int node, int coord) {
    ExprNode n;
    n.op = ExprOp::State;
    n.node = node;
    n.coord = coord;
    return Expr(make(std::move(n)));
}

Expr Expr::clock(const std::string& name) {
    ExprNode n;
    n.op = ExprOp::Clock;
    n.name = name;
    return Expr(make(std::move(n)));
}

Expr Expr::param(const std::string& name) {
    ExprNode n;
    n.op = ExprOp::Param;
    n.name = name;
    return Expr(make(std::move(n)));
}

Expr Expr::call(Func f, std::vector<Expr> args) {
    if (static_cast<int>(args.size()) != func_arity(f)) throw ExpressionError(std::string(func_name(f)) + ": wrong argument count");
    ExprNode n;
    n.op = ExprOp::Call;
    n.func = f;
    for (auto& a : args) n.args.push_back(a.ptr());
    return Expr(make(std::move(n)));
}

std::string Expr::str() const {
    std::string out;
    print(*root_, out);
    return out;
}

bool Expr::is_constant() const {
    bool c = true;
    collect(*root_, [&](const ExprNode& n) { c &= n.op != ExprOp::State && n.op != ExprOp::Clock && n.op != ExprOp::Param; });
    return c;
}

bool Expr::references_state() const { return !state_refs().empty(); }
bool Expr::references_clock() const { return !clock_refs().empty(); }

std::set<std::pair<int, int>> Expr::state_refs() const {
    std::set<std::pair<int, int>> out;
    collect(*root_, [&](const ExprNode& n) {
        if (n.op == ExprOp::State) out.insert({n.node, n.coord});
    });
    return out;
}

std::set<std::string> Expr::clock_refs() const {
    std::set<std::string> out;
    collect(*root_, [&](const ExprNode& n) {
        if (n.op == ExprOp::Clock) out.insert(n.name);
    });
    return out;
}

std::set<std::string> Expr::param_refs() const {
    std::set<std::string> out;
    collect(*root_, [&](const ExprNode& n) {
        if (n.op == ExprOp::Param) out.insert(n.name);
    });
    return out;
}

Expr Expr::transform(const std::function<ExprPtr(const ExprNode&)>& leaf) const { return Expr(transform_node(root_, leaf)); }

Expr Expr::remap_nodes(const std::function<int(int)>& node_map) const {
    return transform([&](const ExprNode& n) -> ExprPtr {
        if (n.op != ExprOp::State) return nullptr;
        return Expr::state(node_map(n.node), n.coord).ptr();
    });
}

Expr Expr::rename_clocks(const std::map<std::string, std::string>& names) const {
    return transform([&](const ExprNode& n) -> ExprPtr {
        if (n.op != ExprOp::Clock) return nullptr;
        auto it = names.find(n.name);
        return it == names.end() ? nullptr : Expr::clock(it->second).ptr();
    });
}

Expr Expr::rename_params(const std::map<std::string, std::string>& names) const {
    return transform([&](const ExprNode& n) -> ExprPtr {
        if (n.op != ExprOp::Param) return nullptr;
        auto it = names.find(n.name);
        return it == names.end() ? nullptr : Expr::param(it->second).ptr();
    });
}

Expr Expr::bind_params(const std::map<std::string, double>& values) const {
    Expr bound = transform([&](const ExprNode& n) -> ExprPtr {
        if (n.op != ExprOp::Param) return nullptr;
        auto it = values.find(n.name);
        return it == values.end() ? nullptr : make_const(it->second);
    });
    return bound.fold();
}

Expr Expr::fold() const { return Expr(fold_node(root_)); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(make_binary(ExprOp::Add, a.ptr(), b.ptr())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(make_binary(ExprOp::Sub, a.ptr(), b.ptr())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(make_binary(ExprOp::Mul, a.ptr(), b.ptr())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(make_binary(ExprOp::Div, a.ptr(), b.ptr())); }
Expr operator-(const Expr& a) {
    ExprNode n;
    n.op = ExprOp::Neg;
    n.args = {a.ptr()};
    return Expr(make(std::move(n)));
}
Expr sin(const Expr& a) { return Expr::call(Func::Sin, {a}); }
Expr cos(const Expr& a) { return Expr::call(Func::Cos, {a}); }
Expr abs(const Expr& a) { return Expr::call(Func::Abs, {a}); }
Expr min(const Expr& a, const Expr& b) { return Expr::call(Func::Min, {a, b}); }
Expr max(const Expr& a, const Expr& b) { return Expr::call(Func::Max, {a, b}); }
Expr circ_dist(const Expr& a, const Expr& b) { return Expr::call(Func::CircDist, {a, b}); }

// ---------------------------------------------------------------- Layout / Program

int Layout::flat_index(int node, int coord) const {
    if (node < 0 || node >= static_cast<int>(offsets.size())) throw ExpressionError("x[" + std::to_string(node) + "][" + std::to_string(coord) + "]: no such node");
    if (coord < 0 || coord >= dims[node]) throw ExpressionError("x[" + std::to_string(node) + "][" + std::to_string(coord) + "]: no such coordinate");
    return offsets[node] + coord;
}

int Layout::clock_index(const std::string& name) const {
    for (std::size_t k = 0; k < clocks.size(); ++k)
        if (clocks[k] == name) return static_cast<int>(k);
    throw ExpressionError("tau[" + name + "]: undeclared clock");
}

int Layout::total_dim() const {
    int d = 0;
    for (int x : dims) d += x;
    return d;
}

Program Program::compile(const Expr& e, const Layout& layout, const std::map<std::string, double>& params) {
    Program p;
    p.emit(e.node(), layout, params, 1);
    if (p.max_depth_ > 64) throw ExpressionError("expression nesting too deep");
    return p;
}

void Program::emit(const ExprNode& n, const Layout& layout, const std::map<std::string, double>& params, int depth) {
    max_depth_ = std::max(max_depth_, depth);
    switch (n.op) {
        case ExprOp::Const: code_.push_back({Code::Const, 0, n.value}); return;
        case ExprOp::State: {
            int idx = layout.flat_index(n.node, n.coord);
            state_idx_.push_back(idx);
            code_.push_back({Code::State, idx, 0.0});
            return;
        }
        case ExprOp::Clock: {
            int idx = layout.clock_index(n.name);
            clock_idx_.push_back(idx);
            code_.push_back({Code::Clock, idx, 0.0});
            return;
        }
        case ExprOp::Param: {
            auto it = params.find(n.name);
            if (it == params.end()) throw ExpressionError("undeclared parameter '" + n.name + "'");
            code_.push_back({Code::Const, 0, it->second});
            return;
        }
        case ExprOp::Neg:
            emit(*n.args[0], layout, params, depth);
            code_.push_back({Code::Neg, 0, 0.0});
            return;
        default: break;
    }
    for (std::size_t k = 0; k < n.args.size(); ++k) emit(*n.args[k], layout, params, depth + static_cast<int>(k));
    Code c = Code::Add;
    switch (n.op) {
        case ExprOp::Add: c = Code::Add; break;
        case ExprOp::Sub: c = Code::Sub; break;
        case ExprOp::Mul: c = Code::Mul; break;
        case ExprOp::Div: c = Code::Div; break;
        case ExprOp::Call:
            switch (n.func) {
                case Func::Sin: c = Code::Sin; break;
                case Func::Cos: c = Code::Cos; break;
                case Func::Abs: c = Code::Abs; break;
                case Func::Min: c = Code::Min; break;
                case Func::Max: c = Code::Max; break;
                case Func::CircDist: c = Code::CircDist; break;
            }
            break;
        default: break;
    }
    code_.push_back({c, 0, 0.0});
}

double Program::eval(const double* x, const double* tau) const {
    std::array<double, 66> st;
    int sp = 0;
    for (const Ins& ins : code_) {
        switch (ins.code) {
            case Code::Const: st[sp++] = ins.v; break;
            case Code::State: st[sp++] = x[ins.idx]; break;
            case Code::Clock: st[sp++] = tau[ins.idx]; break;
            case Code::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Code::Add: --sp; st[sp - 1] += st[sp]; break;
            case Code::Sub: --sp; st[sp - 1] -= st[sp]; break;
            case Code::Mul: --sp; st[sp - 1] *= st[sp]; break;
            case Code::Div:
                --sp;
                if (st[sp] == 0.0) throw ExpressionError("division by zero");
                st[sp - 1] /= st[sp];
                break;
            case Code::Sin: st[sp - 1] = sin_snapped(st[sp - 1]); break;
            case Code::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
            case Code::Abs: st[sp - 1] = std::fabs(st[sp - 1]); break;
            case Code::Min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
            case Code::Max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
            case Code::CircDist: --sp; st[sp - 1] = circular_distance(st[sp - 1], st[sp]); break;
        }
    }
    return sp ? st[0] : 0.0;
}

// ---------------------------------------------------------------- Predicate

std::string_view cmp_symbol(Cmp c) {
    switch (c) {
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Eq: return "=";
        case Cmp::Ge: return ">=";
        case Cmp::Gt: return ">";
    }
    return "?";
}

std::string Atom::str() const { return lhs.str() + " " + std::string(cmp_symbol(cmp)) + " " + rhs.str(); }

bool atom_holds(Cmp c, double g, double eps_eq) {
    switch (c) {
        case Cmp::Lt: return g < 0.0;
        case Cmp::Le: return g <= 0.0;
        case Cmp::Eq: return std::fabs(g) <= eps_eq;
        case Cmp::Ge: return g >= 0.0;
        case Cmp::Gt: return g > 0.0;
    }
    return false;
}

Predicate::Predicate() : root_(std::make_shared<const PredNode>()) {}
Predicate::Predicate(PredPtr root) : root_(std::move(root)) {}

Predicate Predicate::parse(std::string_view text) { return Parser(text).parse_pred_only(); }
Predicate Predicate::always() { return Predicate(); }

Predicate Predicate::never() {
    PredNode n;
    n.kind = PredNode::Kind::False;
    return Predicate(std::make_shared<const PredNode>(std::move(n)));
}

Predicate Predicate::atom(Expr lhs, Cmp cmp, Expr rhs) {
    PredNode n;
    n.kind = PredNode::Kind::Atom;
    n.atom = Atom{std::move(lhs), cmp, std::move(rhs)};
    return Predicate(std::make_shared<const PredNode>(std::move(n)));
}

std::string Predicate::str() const {
    std::string out;
    print_pred(*root_, out);
    return out;
}

std::vector<Atom> Predicate::atoms() const {
    std::vector<Atom> out;
    std::function<void(const PredNode&)> walk = [&](const PredNode& n) {
        if (n.kind == PredNode::Kind::Atom) out.push_back(n.atom);
        for (const auto& k : n.kids) walk(*k);
    };
    walk(*root_);
    return out;
}

Predicate Predicate::transform_exprs(const std::function<Expr(const Expr&)>& f) const {
    std::function<PredPtr(const PredPtr&)> walk = [&](const PredPtr& p) -> PredPtr {
        PredNode n = *p;
        if (n.kind == PredNode::Kind::Atom) {
            n.atom.lhs = f(n.atom.lhs);
            n.atom.rhs = f(n.atom.rhs);
        }
        for (auto& k : n.kids) k = walk(k);
        return std::make_shared<const PredNode>(std::move(n));
    };
    return Predicate(walk(root_));
}

namespace {
Predicate combine(PredNode::Kind kind, const Predicate& a, const Predicate& b) {
    PredNode n;
    n.kind = kind;
    for (const Predicate* p : {&a, &b}) {
        if (p->node().kind == kind) {
            for (const auto& k : p->node().kids) n.kids.push_back(k);
        } else {
            n.kids.push_back(std::make_shared<const PredNode>(p->node()));
        }
    }
    return Predicate(std::make_shared<const PredNode>(std::move(n)));
}
}  // namespace

Predicate operator&&(const Predicate& a, const Predicate& b) { return combine(PredNode::Kind::And, a, b); }
Predicate operator||(const Predicate& a, const Predicate& b) { return combine(PredNode::Kind::Or, a, b); }
Predicate operator!(const Predicate& a) {
    PredNode n;
    n.kind = PredNode::Kind::Not;
    n.kids = {std::make_shared<const PredNode>(a.node())};
    return Predicate(std::make_shared<const PredNode>(std::move(n)));
}

}  // namespace asynet
