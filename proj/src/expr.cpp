#include "lagcorr/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

namespace lagcorr::expr {

int Symbols::var_index(std::string_view name) const
{
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return static_cast<int>(i);
    return -1;
}

int Symbols::param_index(std::string_view name) const
{
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

Expr make(Node n)
{
    n.height = 1 + std::max(n.a ? n.a->height : 0, n.b ? n.b->height : 0);
    return std::make_shared<const Node>(std::move(n));
}

Expr binary(Op op, Expr a, Expr b)
{
    Node n;
    n.op = op;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

bool is_num(const Expr& e) { return e->op == Op::Num; }

Expr num_lexeme(const mpq_class& q, std::string lexeme)
{
    Node n;
    n.op = Op::Num;
    n.num = q;
    n.num.canonicalize();
    n.numd = n.num.get_d();
    n.text = std::move(lexeme);
    return make(std::move(n));
}

const char* func_name(Op f)
{
    switch (f) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Bump: return "bump";
    default: return "?";
    }
}

// ---------------------------------------------------------------- parser

// counts parentheses, function arguments and unary minus signs
constexpr int kMaxDepth = 200;
// evaluation, differentiation and printing recurse on the tree
constexpr int kMaxHeight = 2000;

class Parser {
public:
    Parser(std::string_view s, const Symbols& syms) : s_(s), syms_(syms) {}

    Expr run()
    {
        Expr e = expr(0);
        skip();
        if (pos_ < s_.size()) fail("unexpected character");
        return e;
    }

private:
    std::string_view s_;
    const Symbols& syms_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

    void skip()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void guard(int depth) const
    {
        if (depth > kMaxDepth) fail("nesting too deep");
    }

    Expr bounded(Expr e) const
    {
        if (e->height > kMaxHeight) fail("expression too long");
        return e;
    }

    Expr expr(int depth)
    {
        guard(depth);
        Expr e = term(depth);
        for (;;) {
            if (eat('+'))
                e = bounded(binary(Op::Add, e, term(depth)));
            else if (eat('-'))
                e = bounded(binary(Op::Sub, e, term(depth)));
            else
                return e;
        }
    }

    Expr term(int depth)
    {
        Expr e = unary(depth);
        for (;;) {
            if (eat('*'))
                e = bounded(binary(Op::Mul, e, unary(depth)));
            else if (eat('/'))
                e = bounded(binary(Op::Div, e, unary(depth)));
            else
                return e;
        }
    }

    Expr unary(int depth)
    {
        guard(depth);
        if (eat('-')) {
            Node n;
            n.op = Op::Neg;
            n.a = unary(depth + 1);
            return make(std::move(n));
        }
        return power(depth);
    }

    Expr power(int depth)
    {
        Expr e = atom(depth);
        while (eat('^')) {
            skip();
            bool negative = false;
            if (pos_ < s_.size() && s_[pos_] == '-') {
                negative = true;
                ++pos_;
            }
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == start) fail("integer exponent expected");
            if (pos_ - start > 6) throw SyntaxError(start, "exponent too large");
            int n = std::stoi(std::string(s_.substr(start, pos_ - start)));
            Node p;
            p.op = Op::Pow;
            p.a = e;
            p.ival = negative ? -n : n;
            e = bounded(make(std::move(p)));
        }
        return e;
    }

    Expr number()
    {
        std::size_t start = pos_;
        mpz_class mant = 0;
        long scale = 0;
        bool digits = false;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            mant = mant * 10 + (s_[pos_] - '0');
            ++pos_;
            digits = true;
        }
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                mant = mant * 10 + (s_[pos_] - '0');
                --scale;
                ++pos_;
                digits = true;
            }
        }
        if (!digits) fail("malformed number");
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            bool neg = false;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) neg = s_[pos_++] == '-';
            std::size_t es = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == es) fail("malformed exponent");
            if (pos_ - es > 4) throw SyntaxError(es, "exponent too large");
            long ex = std::stol(std::string(s_.substr(es, pos_ - es)));
            scale += neg ? -ex : ex;
        }
        if (scale > 400 || scale < -400) throw SyntaxError(start, "number out of range");
        mpq_class q(mant);
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
        if (scale < 0)
            q /= p10;
        else
            q *= p10;
        return num_lexeme(q, std::string(s_.substr(start, pos_ - start)));
    }

    Expr atom(int depth)
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr(depth + 1);
            if (!eat(')')) fail("')' expected");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            skip();
            if (pos_ < s_.size() && s_[pos_] == '(') {
                Op f;
                int order = 0;
                if (name == "sin")
                    f = Op::Sin;
                else if (name == "cos")
                    f = Op::Cos;
                else if (name == "exp")
                    f = Op::Exp;
                else if (name == "sqrt")
                    f = Op::Sqrt;
                else if (name == "bump")
                    f = Op::Bump;
                else if (name.size() == 7 && name.compare(0, 6, "bump_d") == 0 && name[6] >= '1' && name[6] <= '8') {
                    f = Op::Bump;
                    order = name[6] - '0';
                }
                else
                    throw Error("UnknownIdentifier", "unknown function '" + name + "' at offset " + std::to_string(start));
                ++pos_;
                Expr arg = expr(depth + 1);
                if (!eat(')')) fail("')' expected");
                Node n;
                n.op = f;
                n.a = arg;
                n.ival = order;
                return make(std::move(n));
            }
            if (int i = syms_.var_index(name); i >= 0) return var(i, name);
            if (int i = syms_.param_index(name); i >= 0) return param(i, name);
            if (name == "pi") return pi();
            throw Error("UnknownIdentifier", "'" + name + "' at offset " + std::to_string(start));
        }
        fail("unexpected character");
    }
};

// --------------------------------------------------------------- printer

int prec(const Expr& e)
{
    switch (e->op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Num:
        if (!e->text.empty()) return 5;
        if (e->num < 0) return 0;
        return e->num.get_den() == 1 ? 5 : 2;
    default: return 5;
    }
}

void emit(const Expr& e, std::string& out);

void emit_child(const Expr& e, int min_prec, std::string& out)
{
    if (prec(e) < min_prec) {
        out += '(';
        emit(e, out);
        out += ')';
    }
    else {
        emit(e, out);
    }
}

void emit(const Expr& e, std::string& out)
{
    switch (e->op) {
    case Op::Num:
        out += e->text.empty() ? e->num.get_str() : e->text;
        return;
    case Op::Var:
    case Op::Param: out += e->text; return;
    case Op::Pi: out += "pi"; return;
    case Op::Add:
    case Op::Sub:
        emit_child(e->a, 1, out);
        out += e->op == Op::Add ? " + " : " - ";
        emit_child(e->b, 2, out);
        return;
    case Op::Mul:
    case Op::Div:
        emit_child(e->a, 2, out);
        out += e->op == Op::Mul ? "*" : "/";
        emit_child(e->b, 3, out);
        return;
    case Op::Neg:
        out += '-';
        emit_child(e->a, 3, out);
        return;
    case Op::Pow:
        emit_child(e->a, 5, out);
        out += '^';
        out += std::to_string(e->ival);
        return;
    case Op::Bump:
        out += e->ival == 0 ? "bump" : "bump_d" + std::to_string(e->ival);
        out += '(';
        emit(e->a, out);
        out += ')';
        return;
    default:
        out += func_name(e->op);
        out += '(';
        emit(e->a, out);
        out += ')';
        return;
    }
}

// ------------------------------------------------------------ evaluation

[[noreturn]] void domain(const char* what) { throw Error("EvaluationDomain", what); }

double checked(double v, const char* what)
{
    if (!std::isfinite(v)) domain(what);
    return v;
}

double eval(const Node& n, std::span<const double> vars, std::span<const double> params)
{
    switch (n.op) {
    case Op::Num: return n.numd;
    case Op::Var:
        if (n.index < 0 || static_cast<std::size_t>(n.index) >= vars.size()) domain("unbound variable");
        return vars[static_cast<std::size_t>(n.index)];
    case Op::Param:
        if (n.index < 0 || static_cast<std::size_t>(n.index) >= params.size()) domain("unbound parameter");
        return params[static_cast<std::size_t>(n.index)];
    case Op::Pi: return std::numbers::pi;
    case Op::Add: return checked(eval(*n.a, vars, params) + eval(*n.b, vars, params), "overflow");
    case Op::Sub: return checked(eval(*n.a, vars, params) - eval(*n.b, vars, params), "overflow");
    case Op::Mul: return checked(eval(*n.a, vars, params) * eval(*n.b, vars, params), "overflow");
    case Op::Div: {
        double num = eval(*n.a, vars, params);
        double den = eval(*n.b, vars, params);
        if (den == 0.0) domain("division by zero");
        return checked(num / den, "overflow");
    }
    case Op::Neg: return -eval(*n.a, vars, params);
    case Op::Pow: {
        double base = eval(*n.a, vars, params);
        if (base == 0.0 && n.ival < 0) domain("division by zero");
        return checked(std::pow(base, n.ival), "overflow");
    }
    case Op::Sin: return std::sin(eval(*n.a, vars, params));
    case Op::Cos: return std::cos(eval(*n.a, vars, params));
    case Op::Exp: return checked(std::exp(eval(*n.a, vars, params)), "overflow");
    case Op::Sqrt: {
        double v = eval(*n.a, vars, params);
        if (v < 0.0) domain("sqrt of negative");
        return std::sqrt(v);
    }
    case Op::Bump: return bump(eval(*n.a, vars, params), n.ival);
    }
    domain("bad node");
}

// Truncated Taylor series arithmetic for the bump derivatives.
constexpr int kJet = 9;
using Jet = std::array<double, kJet>;

Jet jet_recip(const Jet& a)
{
    Jet r{};
    r[0] = 1.0 / a[0];
    for (int n = 1; n < kJet; ++n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) s += a[k] * r[n - k];
        r[n] = -s / a[0];
    }
    return r;
}

Jet jet_exp(const Jet& f)
{
    Jet e{};
    e[0] = std::exp(f[0]);
    for (int n = 1; n < kJet; ++n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) s += k * f[k] * e[n - k];
        e[n] = s / n;
    }
    return e;
}

// psi(u) = exp(-1/u) for u > 0, expanded around u0 with u = u0 + du*h.
Jet jet_psi(double u0, double du)
{
    Jet z{};
    if (u0 < 1.0 / 700.0) return z;
    Jet u{};
    u[0] = u0;
    u[1] = du;
    Jet r = jet_recip(u);
    for (double& v : r) v = -v;
    return jet_exp(r);
}

} // namespace

double bump(double x, int order)
{
    if (order < 0 || order >= kJet) domain("bump derivative order out of range");
    if (!std::isfinite(x)) domain("non-finite bump argument");
    double ax = std::fabs(x);
    if (ax <= 1.0) return order == 0 ? 1.0 : 0.0;
    if (ax >= 2.0) return 0.0;
    double sgn = x > 0 ? 1.0 : -1.0;
    Jet A = jet_psi(2.0 - ax, -sgn);
    Jet B = jet_psi(ax - 1.0, sgn);
    Jet D{};
    for (int i = 0; i < kJet; ++i) D[i] = A[i] + B[i];
    Jet R{};
    for (int n = 0; n < kJet; ++n) {
        double s = A[n];
        for (int k = 1; k <= n; ++k) s -= D[k] * R[n - k];
        R[n] = s / D[0];
    }
    double fact = 1.0;
    for (int k = 2; k <= order; ++k) fact *= k;
    return R[static_cast<std::size_t>(order)] * fact;
}

// ----------------------------------------------------------- constructors

Expr num(const mpq_class& q) { return num_lexeme(q, {}); }

Expr var(int index, std::string name)
{
    Node n;
    n.op = Op::Var;
    n.index = index;
    n.text = std::move(name);
    return make(std::move(n));
}

Expr param(int index, std::string name)
{
    Node n;
    n.op = Op::Param;
    n.index = index;
    n.text = std::move(name);
    return make(std::move(n));
}

Expr pi()
{
    Node n;
    n.op = Op::Pi;
    return make(std::move(n));
}

bool is_const(const Expr& e, const mpq_class& value) { return e->op == Op::Num && e->num == value; }

Expr add(const Expr& x, const Expr& y)
{
    if (is_const(x, 0)) return y;
    if (is_const(y, 0)) return x;
    if (is_num(x) && is_num(y)) return num(x->num + y->num);
    if (y->op == Op::Neg) return sub(x, y->a);
    return binary(Op::Add, x, y);
}

Expr sub(const Expr& x, const Expr& y)
{
    if (is_const(y, 0)) return x;
    if (is_const(x, 0)) return neg(y);
    if (is_num(x) && is_num(y)) return num(x->num - y->num);
    if (y->op == Op::Neg) return add(x, y->a);
    return binary(Op::Sub, x, y);
}

Expr mul(const Expr& x, const Expr& y)
{
    if (is_const(x, 0) || is_const(y, 0)) return num(0);
    if (is_const(x, 1)) return y;
    if (is_const(y, 1)) return x;
    if (is_const(x, -1)) return neg(y);
    if (is_const(y, -1)) return neg(x);
    if (is_num(x) && is_num(y)) return num(x->num * y->num);
    if (is_num(y)) return mul(y, x);
    if (x->op == Op::Neg) return neg(mul(x->a, y));
    if (y->op == Op::Neg) return neg(mul(x, y->a));
    if (is_num(x) && y->op == Op::Mul && is_num(y->a)) return mul(num(x->num * y->a->num), y->b);
    if (!is_num(x) && y->op == Op::Mul && is_num(y->a)) return mul(y->a, mul(x, y->b));
    return binary(Op::Mul, x, y);
}

Expr div(const Expr& x, const Expr& y)
{
    if (is_const(y, 1)) return x;
    if (is_const(x, 0) && !is_const(y, 0)) return num(0);
    if (is_num(x) && is_num(y) && y->num != 0) return num(x->num / y->num);
    return binary(Op::Div, x, y);
}

Expr neg(const Expr& x)
{
    if (is_num(x)) return num(-x->num);
    if (x->op == Op::Neg) return x->a;
    Node n;
    n.op = Op::Neg;
    n.a = x;
    return make(std::move(n));
}

Expr pow(const Expr& x, int n)
{
    if (n == 0) return num(1);
    if (n == 1) return x;
    if (is_num(x) && (x->num != 0 || n > 0) && n > -64 && n < 64) {
        mpq_class r = 1;
        mpq_class b = n > 0 ? x->num : mpq_class(1) / x->num;
        for (int i = 0; i < (n > 0 ? n : -n); ++i) r *= b;
        return num(r);
    }
    Node p;
    p.op = Op::Pow;
    p.a = x;
    p.ival = n;
    return make(std::move(p));
}

Expr call(Op f, const Expr& x, int order)
{
    Node n;
    n.op = f;
    n.a = x;
    n.ival = order;
    return make(std::move(n));
}

// --------------------------------------------------------- public surface

Expr parse(std::string_view text, const Symbols& syms) { return Parser(text, syms).run(); }

std::string print(const Expr& e)
{
    std::string out;
    emit(e, out);
    return out;
}

bool structurally_equal(const Expr& x, const Expr& y)
{
    if (x == y) return true;
    if (!x || !y || x->op != y->op) return false;
    switch (x->op) {
    case Op::Num: return x->num == y->num;
    case Op::Var:
    case Op::Param: return x->index == y->index && x->text == y->text;
    case Op::Pi: return true;
    case Op::Pow: return x->ival == y->ival && structurally_equal(x->a, y->a);
    default:
        if (x->ival != y->ival) return false;
        if (!structurally_equal(x->a, y->a)) return false;
        return !x->b || structurally_equal(x->b, y->b);
    }
}

Expr differentiate(const Expr& e, int v)
{
    switch (e->op) {
    case Op::Num:
    case Op::Param:
    case Op::Pi: return num(0);
    case Op::Var: return num(e->index == v ? 1 : 0);
    case Op::Add: return add(differentiate(e->a, v), differentiate(e->b, v));
    case Op::Sub: return sub(differentiate(e->a, v), differentiate(e->b, v));
    case Op::Neg: return neg(differentiate(e->a, v));
    case Op::Mul:
        return add(mul(differentiate(e->a, v), e->b), mul(e->a, differentiate(e->b, v)));
    case Op::Div: {
        Expr da = differentiate(e->a, v);
        Expr db = differentiate(e->b, v);
        if (is_const(db, 0)) return div(da, e->b);
        return div(sub(mul(da, e->b), mul(e->a, db)), pow(e->b, 2));
    }
    case Op::Pow: {
        Expr da = differentiate(e->a, v);
        if (is_const(da, 0)) return num(0);
        return mul(mul(num(e->ival), pow(e->a, e->ival - 1)), da);
    }
    case Op::Sin: return mul(call(Op::Cos, e->a), differentiate(e->a, v));
    case Op::Cos: return neg(mul(call(Op::Sin, e->a), differentiate(e->a, v)));
    case Op::Exp: return mul(e, differentiate(e->a, v));
    case Op::Sqrt: {
        Expr da = differentiate(e->a, v);
        if (is_const(da, 0)) return num(0);
        return div(da, mul(num(2), e));
    }
    case Op::Bump: {
        Expr da = differentiate(e->a, v);
        if (is_const(da, 0)) return num(0);
        if (e->ival + 1 >= kJet) throw Error("EvaluationDomain", "bump derivative order exceeds 8");
        return mul(call(Op::Bump, e->a, e->ival + 1), da);
    }
    }
    return num(0);
}

Expr substitute(const Expr& e, const std::vector<Expr>& repl)
{
    switch (e->op) {
    case Op::Num:
    case Op::Param:
    case Op::Pi: return e;
    case Op::Var:
        if (e->index < 0 || static_cast<std::size_t>(e->index) >= repl.size() || !repl[static_cast<std::size_t>(e->index)])
            throw Error("UnknownIdentifier", "no replacement for variable '" + e->text + "'");
        return repl[static_cast<std::size_t>(e->index)];
    case Op::Add: return add(substitute(e->a, repl), substitute(e->b, repl));
    case Op::Sub: return sub(substitute(e->a, repl), substitute(e->b, repl));
    case Op::Mul: return mul(substitute(e->a, repl), substitute(e->b, repl));
    case Op::Div: return div(substitute(e->a, repl), substitute(e->b, repl));
    case Op::Neg: return neg(substitute(e->a, repl));
    case Op::Pow: return pow(substitute(e->a, repl), e->ival);
    default: return call(e->op, substitute(e->a, repl), e->ival);
    }
}

double evaluate(const Expr& e, std::span<const double> vars, std::span<const double> params)
{
    return eval(*e, vars, params);
}

} // namespace lagcorr::expr
