#ifndef LAGCORR_EXPR_HPP
#define LAGCORR_EXPR_HPP

#include <gmpxx.h>

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lagcorr/error.hpp"

namespace lagcorr::expr {

enum class Op { Num, Var, Param, Pi, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt, Bump };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Num;
    mpq_class num;       // Num
    double numd = 0.0;   // Num, cached
    std::string text;    // Num: source lexeme if any; Var/Param: name
    int index = -1;      // Var/Param slot
    int ival = 0;        // Pow exponent, Bump derivative order
    int height = 1;      // set by the constructors from the children
    Expr a, b;
};

// Declared names. Variables are differentiated, parameters are constants
// bound at evaluation time.
struct Symbols {
    std::vector<std::string> vars;
    std::vector<std::string> params;

    int var_index(std::string_view name) const;
    int param_index(std::string_view name) const;
};

// Grammar (see docs/grammar.md):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' '-'? integer)*
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
Expr parse(std::string_view text, const Symbols& syms);

std::string print(const Expr& e);

bool structurally_equal(const Expr& x, const Expr& y);

// Exact symbolic derivative with respect to variable slot `var`.
Expr differentiate(const Expr& e, int var);

// Replace variable slot i by repl[i]; the result refers to whatever slots
// the replacement expressions use.
Expr substitute(const Expr& e, const std::vector<Expr>& repl);

// Throws Error("EvaluationDomain") on division by zero, sqrt of a negative,
// or any non-finite intermediate.
double evaluate(const Expr& e, std::span<const double> vars, std::span<const double> params = {});

// Smooth plateau: 1 on (-1,1), 0 outside (-2,2), monotone shoulders.
// order = derivative order (0..8).
double bump(double x, int order = 0);

// constructors with light simplification
Expr num(const mpq_class& q);
Expr var(int index, std::string name);
Expr param(int index, std::string name);
Expr pi();
Expr add(const Expr& x, const Expr& y);
Expr sub(const Expr& x, const Expr& y);
Expr mul(const Expr& x, const Expr& y);
Expr div(const Expr& x, const Expr& y);
Expr neg(const Expr& x);
Expr pow(const Expr& x, int n);
Expr call(Op f, const Expr& x, int order = 0);

bool is_const(const Expr& e, const mpq_class& value);

} // namespace lagcorr::expr

#endif
