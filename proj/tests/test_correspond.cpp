#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "lagcorr/correspond.hpp"
#include "lagcorr/scenario.hpp"
#include "oracles.hpp"

using namespace lagcorr;

namespace {

Scenario load(const char* name) { return load_scenario(std::string(LAGCORR_SOURCE_DIR) + "/scenarios/" + name); }

std::string kind_of(const std::function<void()>& f)
{
    try {
        f();
    }
    catch (const Error& e) {
        return e.kind();
    }
    return "";
}

} // namespace

TEST(Correspond, TwoToOneCompositions)
{
    Scenario sc = load("covering_2to1.json");
    const Correspondence& corr = *sc.correspondence;
    Composition left = compose_left(sc.curves[0], corr);
    ASSERT_EQ(left.curves.components.size(), 1u);
    EXPECT_EQ(left.curves.components[0].holonomy, Vec2(Q(2), Q(0)));
    EXPECT_TRUE(left.exact);
    Composition right = compose_right(corr, sc.curves[1]);
    ASSERT_EQ(right.curves.components.size(), 1u);
    EXPECT_EQ(right.curves.components[0].size(), 6u);
    EXPECT_EQ(right.curves.components[0].holonomy, Vec2(Q(2), Q(0)));
}

TEST(Correspond, TwoToOneGeneratorBijection)
{
    Scenario sc = load("covering_2to1.json");
    Bijection b = generator_bijection(sc.curves[0], *sc.correspondence, sc.curves[1]);
    ASSERT_TRUE(b.valid) << b.problem;
    EXPECT_EQ(b.quilt.triples.size(), 4u);
    EXPECT_EQ(b.left.size(), 4u);
    EXPECT_EQ(b.right.size(), 4u);
    std::set<Vec2> points;
    for (const auto& t : b.quilt.triples) points.insert(t.x.point);
    std::set<Vec2> want{{Q(2, 5), Q(0)}, {Q(3, 5), Q(0)}, {Q(7, 5), Q(0)}, {Q(8, 5), Q(0)}};
    EXPECT_EQ(points, want);
    std::set<int> l(b.to_left.begin(), b.to_left.end()), r(b.to_right.begin(), b.to_right.end());
    EXPECT_EQ(l.size(), 4u);
    EXPECT_EQ(r.size(), 4u);
}

TEST(Correspond, AlphaBetaQuilt)
{
    Scenario sc = load("covering_2to1_quilt.json");
    Bijection b = generator_bijection(sc.curves[0], *sc.correspondence, sc.curves[1]);
    ASSERT_TRUE(b.valid);
    EXPECT_EQ(b.quilt.triples.size(), 2u);
}

TEST(Correspond, TriplesMatchBruteForce)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 8; ++i) {
        CoveringInstance inst = random_covering_instance(rng);
        QuiltedGenerators g = quilted_generators(inst.l1, inst.corr, inst.l2);
        EXPECT_EQ(g.triples.size(), oracle::brute_triples(inst.corr, inst.l1, inst.l2)) << i;
        for (const auto& t : g.triples) {
            EXPECT_TRUE(point_on_curve(MultiCurve{{inst.l1}}, t.image1));
            EXPECT_TRUE(point_on_curve(MultiCurve{{inst.l2}}, t.image2));
            EXPECT_EQ(t.sheet, 0);
        }
    }
}

TEST(Correspond, PointOnCurve)
{
    Scenario sc = load("covering_2to1.json");
    MultiCurve a{{sc.curves[0]}};
    EXPECT_TRUE(point_on_curve(a, {Q(3, 7), Q(0)}));
    EXPECT_TRUE(point_on_curve(a, {Q(3, 7), Q(5)}));
    EXPECT_FALSE(point_on_curve(a, {Q(3, 7), Q(1, 2)}));
}

TEST(Correspond, InvalidPairings)
{
    Scenario cov = load("covering_2to1.json");
    Scenario fold = load("fold_dehn1.json");
    EXPECT_EQ(kind_of([&] { make_correspondence(cov.correspondence->leg1, fold.correspondence->leg2); }),
              "InvalidCorrespondence");
    EXPECT_EQ(kind_of([&] { make_correspondence(fold_leg(Q(1), std::nullopt), fold_leg(Q(1), std::nullopt)); }),
              "InvalidCorrespondence");
    EXPECT_EQ(kind_of([&] { make_correspondence(fold_leg(Q(1), std::nullopt), fold_leg(Q(2), dehn_twist_profile(1))); }),
              "InvalidCorrespondence");
    EXPECT_EQ(kind_of([&] { compose_left(cov.curves[1], *fold.correspondence); }), "WrongSurface");
}

TEST(Correspond, FoldTwistLeg)
{
    Scenario sc = load("fold_dehn1.json");
    const Correspondence& corr = *sc.correspondence;
    EXPECT_EQ(corr.leg2.shift(Q(0)), Q(1, 2));
    EXPECT_EQ(corr.leg2.shift(Q(1, 2)), Q(5, 6));
    EXPECT_EQ(corr.leg2.apply({Q(0), Q(1, 2)}), Vec2(Q(5, 6), Q(1, 4)));
    EXPECT_EQ(corr.leg1.apply({Q(1, 3), Q(-1, 2)}), Vec2(Q(1, 3), Q(1, 4)));
    auto circles = bisingular_circles(corr);
    ASSERT_EQ(circles.size(), 1u);
    EXPECT_EQ(circles[0].height, 0);
}

TEST(Correspond, FoldPreimagesAndTriples)
{
    Scenario sc = load("fold_dehn1.json");
    const Correspondence& corr = *sc.correspondence;
    Composition left = compose_left(sc.curves[0], corr, sc.tau);
    ASSERT_EQ(left.curves.components.size(), 2u);
    EXPECT_FALSE(left.exact);
    EXPECT_LE(left.tolerance, sc.tau);
    // one preimage per sheet, each closing up once around the cylinder
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(left.curves.components[k].holonomy, Vec2(Q(1), Q(0)));
        const auto& sheets = left.origin[k].edge_sheet;
        ASSERT_FALSE(sheets.empty());
        for (int s : sheets) EXPECT_EQ(s, sheets.front());
    }
    EXPECT_NE(left.origin[0].edge_sheet.front(), left.origin[1].edge_sheet.front());
    QuiltedGenerators g = quilted_generators(sc.curves[0], corr, sc.curves[1], sc.tau);
    ASSERT_EQ(g.triples.size(), 8u);
    int plus = 0;
    for (const auto& t : g.triples) plus += t.sheet > 0;
    EXPECT_EQ(plus, 4);
}
