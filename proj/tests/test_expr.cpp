#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lagcorr/expr.hpp"
#include "oracles.hpp"

using namespace lagcorr;
using namespace lagcorr::expr;

namespace {

const Symbols kSyms{{"x1", "x2", "x3"}, {"r", "s"}};

double eval(const std::string& text, std::vector<double> x, std::vector<double> p = {})
{
    return evaluate(parse(text, kSyms), x, p);
}

} // namespace

TEST(Expr, ParsesProductWithPower)
{
    Expr e = parse("x1*x3^2", kSyms);
    ASSERT_EQ(e->op, Op::Mul);
    EXPECT_EQ(e->a->op, Op::Var);
    EXPECT_EQ(e->a->index, 0);
    ASSERT_EQ(e->b->op, Op::Pow);
    EXPECT_EQ(e->b->ival, 2);
    EXPECT_EQ(e->b->a->index, 2);
    EXPECT_EQ(print(e), "x1*x3^2");
}

TEST(Expr, SingleVariable)
{
    Expr e = parse("x1", kSyms);
    EXPECT_EQ(e->op, Op::Var);
    EXPECT_EQ(e->index, 0);
}

TEST(Expr, UnterminatedCallReportsOffset)
{
    try {
        parse("sin(", kSyms);
        FAIL() << "no error";
    }
    catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 4u);
    }
}

TEST(Expr, RejectsUnknownNamesAndVariableExponents)
{
    try {
        parse("foo + 1", kSyms);
        FAIL() << "no error";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), "UnknownIdentifier");
    }
    EXPECT_THROW(parse("x1^x2", kSyms), SyntaxError);
    EXPECT_THROW(parse("x1 2", kSyms), SyntaxError);
    EXPECT_THROW(parse("", kSyms), SyntaxError);
    EXPECT_THROW(parse("(x1", kSyms), SyntaxError);
}

TEST(Expr, PrecedenceAndAssociativity)
{
    EXPECT_DOUBLE_EQ(eval("-x1^2", {2, 0, 0}), -4);
    EXPECT_DOUBLE_EQ(eval("2^3^2", {0, 0, 0}), 64);
    EXPECT_DOUBLE_EQ(eval("8/4/2", {0, 0, 0}), 1);
    EXPECT_DOUBLE_EQ(eval("1-2-3", {0, 0, 0}), -4);
    EXPECT_DOUBLE_EQ(eval("1+2*3", {0, 0, 0}), 7);
    EXPECT_DOUBLE_EQ(eval("x1^-2", {2, 0, 0}), 0.25);
    EXPECT_NEAR(eval("pi", {0, 0, 0}), M_PI, 1e-15);
}

TEST(Expr, DerivativesOfPerturbationTerm)
{
    Expr e = parse("x1*x3^2", kSyms);
    Expr d3 = differentiate(e, 2);
    Expr d33 = differentiate(d3, 2);
    EXPECT_EQ(print(d3), "2*(x1*x3)");
    EXPECT_EQ(print(d33), "2*x1");
    EXPECT_TRUE(structurally_equal(d33, parse("2*x1", kSyms)));
    std::vector<double> at{0, 5, 7};
    EXPECT_EQ(evaluate(d33, at), 0.0);
}

TEST(Expr, DerivativeOfConstantIsZero)
{
    EXPECT_TRUE(is_const(differentiate(parse("3/7 + r*s", kSyms), 0), 0));
}

TEST(Expr, GeneratingFunctionDerivatives)
{
    Expr h = parse("1/2*r*x1^2 + s*x1*x2 - 1/2*r*x2^2", kSyms);
    Expr h1 = differentiate(h, 0), h2 = differentiate(h, 1);
    std::vector<double> p{1.3, -0.4};
    for (double x1 : {-1.0, 0.25, 2.0})
        for (double x2 : {-0.5, 0.0, 3.0}) {
            std::vector<double> x{x1, x2, 0};
            EXPECT_NEAR(evaluate(h1, x, p), 1.3 * x1 - 0.4 * x2, 1e-14);
        }
    std::vector<double> o{0, 0, 0};
    EXPECT_NEAR(evaluate(differentiate(h1, 0), o, p), 1.3, 1e-15);
    EXPECT_NEAR(evaluate(differentiate(h1, 1), o, p), -0.4, 1e-15);
    EXPECT_NEAR(evaluate(differentiate(h2, 1), o, p), -1.3, 1e-15);
}

TEST(Expr, EvaluationAndDomainErrors)
{
    EXPECT_DOUBLE_EQ(eval("x2^2", {0, 3, 0}), 9);
    try {
        eval("1/x1", {0, 0, 0});
        FAIL() << "no error";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), "EvaluationDomain");
    }
    EXPECT_THROW(eval("sqrt(x1)", {-1, 0, 0}), Error);
    EXPECT_THROW(eval("exp(x1)", {1000, 0, 0}), Error);
}

TEST(Expr, BumpPlateauAndShoulder)
{
    EXPECT_EQ(bump(0.5), 1.0);
    EXPECT_EQ(bump(-0.99), 1.0);
    EXPECT_EQ(bump(2.0), 0.0);
    EXPECT_EQ(bump(-3.0), 0.0);
    EXPECT_DOUBLE_EQ(bump(1.5), 0.5);
    double prev = 1;
    for (double x = 1; x <= 2; x += 0.01) {
        double b = bump(x);
        EXPECT_LE(b, prev + 1e-15);
        EXPECT_NEAR(bump(x), bump(-x), 1e-15);
        prev = b;
    }
    EXPECT_EQ(eval("bump(x1)", {0.5, 0, 0}), 1.0);
}

TEST(Expr, BumpDerivativesMatchDifferences)
{
    const double h = 1e-6;
    for (int order = 0; order < 4; ++order)
        for (double x : {1.1, 1.37, 1.5, 1.8, -1.6}) {
            double fd = (bump(x + h, order) - bump(x - h, order)) / (2 * h);
            EXPECT_NEAR(bump(x, order + 1), fd, 1e-4 * (1 + std::abs(fd))) << order << ' ' << x;
        }
}

TEST(Expr, PrintParseRoundTrip)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
        Expr e = parse(oracle::random_expression(rng, {"x1", "x2", "x3", "r"}, 4), kSyms);
        Expr back = parse(print(e), kSyms);
        EXPECT_TRUE(structurally_equal(e, back)) << print(e);
    }
}

TEST(Expr, GradientMatchesCentralDifferences)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 200; ++i) {
        Expr e = parse(oracle::random_expression(rng, {"x1", "x2", "x3"}, 4), kSyms);
        std::vector<double> x{u(rng), u(rng), u(rng)};
        int v = static_cast<int>(rng() % 3);
        double sym = evaluate(differentiate(e, v), x);
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(v)] += h;
        xm[static_cast<std::size_t>(v)] -= h;
        double fd = (evaluate(e, xp) - evaluate(e, xm)) / (2 * h);
        EXPECT_LT(std::abs(sym - fd) / (1 + std::abs(sym)), 1e-5) << print(e);
    }
}

TEST(Expr, FuzzedInputsOnlyRaiseLibraryErrors)
{
    std::mt19937_64 rng(1234);
    int accepted = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string s = oracle::fuzz_input(rng);
        try {
            parse(s, kSyms);
            ++accepted;
        }
        catch (const Error&) {
        }
    }
    EXPECT_GT(accepted, 0);
}

TEST(Expr, DeepNestingIsRejectedNotOverflowed)
{
    std::string deep(100000, '(');
    deep += "x1";
    deep += std::string(100000, ')');
    EXPECT_THROW(parse(deep, kSyms), SyntaxError);
    std::string ok(50, '(');
    ok += "x1";
    ok += std::string(50, ')');
    EXPECT_NO_THROW(parse(ok, kSyms));
}

TEST(Expr, LongChainsAreRejectedNotOverflowed)
{
    std::string chain = "x1";
    for (int i = 0; i < 100000; ++i) chain += "*x1+x1";
    EXPECT_THROW(parse(chain, kSyms), SyntaxError);
    std::string fine = "x1";
    for (int i = 0; i < 500; ++i) fine += "*x2+x1";
    std::vector<double> x{1.0, 0.5, 0.0};
    EXPECT_DOUBLE_EQ(evaluate(differentiate(parse(fine, kSyms), 0), x), 1 + 500 * 0.5);
}
