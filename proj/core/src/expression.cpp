#include "nhfa/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace nhfa {

namespace {
enum class Op {
    Const,
    Var,   // x | w | xi | t
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Abs,
    Sign,  // internal, produced by d/dx abs
};
}  // namespace

struct Expr::Node {
    Op op;
    double value = 0.0;     // Const
    int var = 0;            // Var: 0=x 1=w 2=xi 3=t
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

NodePtr make_var(int idx) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::Var;
    n->var = idx;
    return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

// Folding keeps derivative trees small under repeated differentiation.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
    return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
    if (is_const(a, 0.0)) return make(Op::Neg, std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
    return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const && b->value != 0.0)
        return make_const(a->value / b->value);
    return make(Op::Div, std::move(a), std::move(b));
}

NodePtr pow_node(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (is_const(b, 0.0)) return make_const(1.0);
    if (a->op == Op::Const && b->op == Op::Const)
        return make_const(std::pow(a->value, b->value));
    return make(Op::Pow, std::move(a), std::move(b));
}

double eval_node(const Expr::Node& n, const VarValues& v) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var:
            switch (n.var) {
                case 0: return v.x;
                case 1: return v.w;
                case 2: return v.xi;
                default: return v.t;
            }
        case Op::Add: return eval_node(*n.a, v) + eval_node(*n.b, v);
        case Op::Sub: return eval_node(*n.a, v) - eval_node(*n.b, v);
        case Op::Mul: return eval_node(*n.a, v) * eval_node(*n.b, v);
        case Op::Div: return eval_node(*n.a, v) / eval_node(*n.b, v);
        case Op::Pow: return std::pow(eval_node(*n.a, v), eval_node(*n.b, v));
        case Op::Neg: return -eval_node(*n.a, v);
        case Op::Exp: return std::exp(eval_node(*n.a, v));
        case Op::Log: return std::log(eval_node(*n.a, v));
        case Op::Sin: return std::sin(eval_node(*n.a, v));
        case Op::Cos: return std::cos(eval_node(*n.a, v));
        case Op::Abs: return std::abs(eval_node(*n.a, v));
        case Op::Sign: {
            double u = eval_node(*n.a, v);
            return u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
        }
    }
    return 0.0;
}

NodePtr diff(const NodePtr& n, int var);

NodePtr diff(const NodePtr& n, int var) {
    switch (n->op) {
        case Op::Const: return make_const(0.0);
        case Op::Var: return make_const(n->var == var ? 1.0 : 0.0);
        case Op::Add: return add(diff(n->a, var), diff(n->b, var));
        case Op::Sub: return sub(diff(n->a, var), diff(n->b, var));
        case Op::Mul: return add(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var)));
        case Op::Div:
            return div(sub(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var))),
                       mul(n->b, n->b));
        case Op::Pow: {
            if (n->b->op == Op::Const) {
                const double e = n->b->value;
                return mul(mul(make_const(e), pow_node(n->a, make_const(e - 1.0))), diff(n->a, var));
            }
            // f^g = exp(g log f)
            NodePtr f = n->a, g = n->b;
            NodePtr term = add(mul(diff(g, var), make(Op::Log, f)), div(mul(g, diff(f, var)), f));
            return mul(make(Op::Pow, f, g), term);
        }
        case Op::Neg: return make(Op::Neg, diff(n->a, var));
        case Op::Exp: return mul(make(Op::Exp, n->a), diff(n->a, var));
        case Op::Log: return div(diff(n->a, var), n->a);
        case Op::Sin: return mul(make(Op::Cos, n->a), diff(n->a, var));
        case Op::Cos: return make(Op::Neg, mul(make(Op::Sin, n->a), diff(n->a, var)));
        case Op::Abs: return mul(make(Op::Sign, n->a), diff(n->a, var));
        case Op::Sign: return make_const(0.0);  // a.e.
    }
    return make_const(0.0);
}

bool uses_node(const Expr::Node& n, int var) {
    if (n.op == Op::Var) return n.var == var;
    if (n.a && uses_node(*n.a, var)) return true;
    if (n.b && uses_node(*n.b, var)) return true;
    return false;
}

std::string print_node(const Expr::Node& n) {
    auto paren = [](const std::string& s) { return "(" + s + ")"; };
    switch (n.op) {
        case Op::Const: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
        }
        case Op::Var: return n.var == 0 ? "x" : (n.var == 1 ? "w" : (n.var == 2 ? "xi" : "t"));
        case Op::Add: return paren(print_node(*n.a) + "+" + print_node(*n.b));
        case Op::Sub: return paren(print_node(*n.a) + "-" + print_node(*n.b));
        case Op::Mul: return paren(print_node(*n.a) + "*" + print_node(*n.b));
        case Op::Div: return paren(print_node(*n.a) + "/" + print_node(*n.b));
        case Op::Pow: return "pow(" + print_node(*n.a) + "," + print_node(*n.b) + ")";
        case Op::Neg: return paren("-" + print_node(*n.a));
        case Op::Exp: return "exp(" + print_node(*n.a) + ")";
        case Op::Log: return "log(" + print_node(*n.a) + ")";
        case Op::Sin: return "sin(" + print_node(*n.a) + ")";
        case Op::Cos: return "cos(" + print_node(*n.a) + ")";
        case Op::Abs: return "abs(" + print_node(*n.a) + ")";
        case Op::Sign: return "sign(" + print_node(*n.a) + ")";
    }
    return {};
}

// Recursive-descent parser for the infix grammar.
class Parser {
  public:
    explicit Parser(std::string_view s) : src_(s) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            throw std::invalid_argument("symbol expression: trailing input at '" +
                                        std::string(src_.substr(pos_)) + "'");
        return e;
    }

  private:
    std::string_view src_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr e = term();
        while (true) {
            if (eat('+')) e = add(e, term());
            else if (eat('-')) e = sub(e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        while (true) {
            if (eat('*')) e = mul(e, unary());
            else if (eat('/')) e = div(e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) return pow_node(base, unary());  // right-associative
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw std::invalid_argument("symbol expression: unexpected end");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) throw std::invalid_argument("symbol expression: missing ')'");
            return e;
        }
        throw std::invalid_argument(std::string("symbol expression: unexpected character '") + c + "'");
    }

    NodePtr number() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // 'e' was not an exponent
            }
        }
        return make_const(std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr));
    }

    NodePtr identifier() {
        size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (name == "x") return make_var(0);
        if (name == "w") return make_var(1);
        if (name == "xi") return make_var(2);
        if (name == "t") return make_var(3);
        if (name == "pi") return make_const(pi);
        if (name == "pow") {
            if (!eat('(')) throw std::invalid_argument("pow expects '('");
            NodePtr a = expr();
            if (!eat(',')) throw std::invalid_argument("pow expects two arguments");
            NodePtr b = expr();
            if (!eat(')')) throw std::invalid_argument("pow: missing ')'");
            return pow_node(a, b);
        }
        Op op;
        if (name == "exp") op = Op::Exp;
        else if (name == "log") op = Op::Log;
        else if (name == "sin") op = Op::Sin;
        else if (name == "cos") op = Op::Cos;
        else if (name == "abs") op = Op::Abs;
        else throw std::invalid_argument("symbol expression: unknown identifier '" + name + "'");
        if (!eat('(')) throw std::invalid_argument(name + " expects '('");
        NodePtr a = expr();
        if (!eat(')')) throw std::invalid_argument(name + ": missing ')'");
        return make(op, a);
    }
};

int var_index(const std::string& name) {
    if (name == "x") return 0;
    if (name == "w") return 1;
    if (name == "xi") return 2;
    if (name == "t") return 3;
    throw std::invalid_argument("unknown variable '" + name + "'");
}

}  // namespace

Expr Expr::constant(double value) { return Expr(make_const(value)); }
Expr Expr::variable(const std::string& name) { return Expr(make_var(var_index(name))); }
Expr Expr::parse(std::string_view text) { return Expr(Parser(text).run()); }

double Expr::eval(const VarValues& vars) const {
    if (!node_) throw std::logic_error("Expr::eval on empty expression");
    return eval_node(*node_, vars);
}

Expr Expr::derivative(const std::string& var) const {
    if (!node_) throw std::logic_error("Expr::derivative on empty expression");
    return Expr(diff(node_, var_index(var)));
}

bool Expr::uses(const std::string& var) const {
    return node_ && uses_node(*node_, var_index(var));
}

std::string Expr::to_string() const { return node_ ? print_node(*node_) : std::string(); }

Expr Expr::operator+(const Expr& o) const { return Expr(add(node_, o.node_)); }
Expr Expr::operator-(const Expr& o) const { return Expr(sub(node_, o.node_)); }
Expr Expr::operator*(const Expr& o) const { return Expr(mul(node_, o.node_)); }
Expr Expr::operator/(const Expr& o) const { return Expr(div(node_, o.node_)); }

}  // namespace nhfa
