#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "lagcorr/floer.hpp"
#include "lagcorr/scenario.hpp"
#include "oracles.hpp"

using namespace lagcorr;

namespace {

Q q(const char* s) { return parse_rational(s); }

FlatSurface unit() { return make_torus({Q(1), Q(0)}, {Q(0), Q(1)}); }
PLCurve alpha() { return make_curve(unit(), {{Q(0), Q(0)}}, {Q(1), Q(0)}); }
PLCurve gamma()
{
    return make_curve(unit(), {{q("3/10"), q("-1/10")}, {q("1/2"), q("1/10")}, {q("7/10"), q("-1/10")}},
                      {Q(1), Q(0)});
}

Scenario load(const char* name) { return load_scenario(std::string(LAGCORR_SOURCE_DIR) + "/scenarios/" + name); }

} // namespace

TEST(Floer, AlphaGammaBigonsCancel)
{
    FloerComplex c = differential(alpha(), gamma());
    ASSERT_EQ(c.size(), 2u);
    ASSERT_EQ(c.bigons.size(), 2u);
    auto lunes = oracle::lunes_of(c.bigons);
    EXPECT_EQ(lunes[0].area, q("1/100"));
    EXPECT_EQ(lunes[1].area, q("7/100"));
    for (const auto& b : c.bigons) {
        EXPECT_EQ(b.from, 1);
        EXPECT_EQ(b.to, 0);
    }
    // two lunes between the same pair: the entry vanishes mod 2
    EXPECT_EQ(c.matrix, (Matrix{{0, 0}, {0, 0}}));
    EXPECT_TRUE(squares_to_zero(c));
}

TEST(Floer, BigonPolygonsAreCounterclockwiseFromPlusCorner)
{
    FloerComplex c = differential(alpha(), gamma());
    for (const auto& b : c.bigons) {
        Q area = 0;
        for (std::size_t i = 0; i < b.polygon.size(); ++i)
            area += cross(b.polygon[i], b.polygon[(i + 1) % b.polygon.size()]);
        EXPECT_GT(area, 0);
        EXPECT_EQ(unit().reduce(b.polygon.front()), unit().reduce(c.generators[static_cast<std::size_t>(b.from)].point));
        EXPECT_TRUE(b.convex_from);
        EXPECT_TRUE(b.convex_to);
    }
}

TEST(Floer, TwoToOneComparison)
{
    Scenario sc = load("covering_2to1.json");
    ComparisonReport r = compare_complexes(sc.curves[0], *sc.correspondence, sc.curves[1]);
    EXPECT_TRUE(r.agree);
    EXPECT_TRUE(r.exact);
    EXPECT_TRUE(r.disagreements.empty());
    EXPECT_EQ(r.left.bigons.size(), 4u);
    EXPECT_EQ(r.right.bigons.size(), 4u);
    EXPECT_EQ(r.lifted.bigons.size(), 4u);
    EXPECT_EQ(r.left.matrix, (Matrix{{0, 1, 0, 1}, {0, 0, 0, 0}, {0, 1, 0, 1}, {0, 0, 0, 0}}));
    int nonzero = 0;
    for (const auto& e : r.entries) {
        EXPECT_EQ(e.left, e.right);
        EXPECT_EQ(e.left, e.lifted);
        nonzero += e.left;
    }
    EXPECT_EQ(nonzero, 4);
}

TEST(Floer, MultiplyModTwo)
{
    Matrix a{{0, 1}, {1, 1}}, b{{1, 1}, {0, 1}};
    EXPECT_EQ(multiply_mod2(a, b), (Matrix{{0, 1}, {1, 0}}));
    Matrix n{{0, 1}, {0, 0}};
    EXPECT_EQ(multiply_mod2(n, n), (Matrix{{0, 0}, {0, 0}}));
}

TEST(Floer, RandomPairsSquareToZeroAndMatchLunes)
{
    std::mt19937_64 rng(515);
    int done = 0, with_bigons = 0;
    while (done < 12) {
        FlatSurface t = random_torus(rng);
        PLCurve a = random_curve(t, rng), b = random_curve(t, rng);
        FloerComplex c;
        try {
            c = differential(a, b);
        }
        catch (const Error&) {
            continue;
        }
        ++done;
        EXPECT_TRUE(squares_to_zero(c));
        EXPECT_EQ(oracle::lunes_of(c.bigons), oracle::brute_lunes(c.c1, c.c2, c.generators, 2)) << done;
        with_bigons += !c.bigons.empty();
    }
    EXPECT_GT(with_bigons, 0);
}

TEST(Floer, NonEmbeddedLiftIsRejected)
{
    PLCurve s = make_curve(unit(), {{Q(0), Q(0)}, {q("3/4"), q("1/4")}, {q("1/4"), q("1/4")}}, {Q(1), Q(0)});
    PLCurve v = make_curve(unit(), {{q("1/8"), Q(0)}}, {Q(0), Q(1)});
    try {
        differential(s, v);
        FAIL() << "no error";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), "NotEmbeddedLift");
    }
}

TEST(Floer, ComparisonNeedsCoverings)
{
    Scenario sc = load("fold_dehn1.json");
    try {
        compare_complexes(sc.curves[0], *sc.correspondence, sc.curves[1]);
        FAIL() << "no error";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), "CoveringRequired");
    }
}

TEST(Floer, CsvAndSvgWriters)
{
    FloerComplex c = differential(alpha(), gamma());
    std::ostringstream csv, svg;
    write_csv(c, csv);
    write_svg(c, svg);
    EXPECT_EQ(csv.str(),
              "generator,curve1,edge1,s1,curve2,edge2,s2,x,y\n"
              "0,0,0,2/5,0,0,1/2,2/5,0\n"
              "1,0,0,3/5,0,1,1/2,3/5,0\n"
              "\nrow\\col,0,1\n0,0,0\n1,0,0\n");
    EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
}
