#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "lagcorr/curves.hpp"
#include "lagcorr/scenario.hpp"
#include "oracles.hpp"

using namespace lagcorr;

namespace {

Q q(const char* s) { return parse_rational(s); }

FlatSurface unit() { return make_torus({Q(1), Q(0)}, {Q(0), Q(1)}); }

PLCurve alpha() { return make_curve(unit(), {{Q(0), Q(0)}}, {Q(1), Q(0)}); }
PLCurve beta() { return make_curve(unit(), {{q("1/2"), Q(0)}}, {Q(0), Q(1)}); }
PLCurve gamma()
{
    return make_curve(unit(), {{q("3/10"), q("-1/10")}, {q("1/2"), q("1/10")}, {q("7/10"), q("-1/10")}},
                      {Q(1), Q(0)});
}

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

TEST(Curves, ConstructionErrors)
{
    FlatSurface t = unit();
    EXPECT_EQ(kind_of([&] { make_curve(t, {{Q(0), Q(0)}}, {q("1/2"), Q(0)}); }), "NotClosed");
    EXPECT_EQ(kind_of([&] { make_curve(t, {{Q(0), Q(0)}, {q("1/2"), Q(0)}, {q("1/4"), Q(0)}}, {Q(1), Q(0)}); }),
              "BacktrackingEdge");
    EXPECT_EQ(kind_of([&] { make_curve(t, {{Q(0), Q(0)}, {Q(0), Q(0)}}, {Q(1), Q(0)}); }), "ZeroEdge");
    EXPECT_EQ(kind_of([&] { make_curve(t, {}, {Q(1), Q(0)}); }), "ZeroEdge");
    FlatSurface c = make_cylinder(Q(1), Q(-1), Q(1));
    EXPECT_EQ(kind_of([&] { make_curve(c, {{Q(0), Q(2)}}, {Q(1), Q(0)}); }), "OutOfCylinder");
}

TEST(Curves, AlphaMeetsGammaTwice)
{
    auto x = intersect(alpha(), gamma());
    ASSERT_EQ(x.size(), 2u);
    EXPECT_EQ(x[0].point, Vec2(q("2/5"), Q(0)));
    EXPECT_EQ(x[0].edge2, 0);
    EXPECT_EQ(x[0].s2, q("1/2"));
    EXPECT_EQ(x[1].point, Vec2(q("3/5"), Q(0)));
    EXPECT_EQ(x[1].edge2, 1);
    EXPECT_EQ(x[1].s1, q("3/5"));
}

TEST(Curves, AlphaMeetsBetaOnce)
{
    auto x = intersect(alpha(), beta());
    ASSERT_EQ(x.size(), 1u);
    EXPECT_EQ(x[0].point, Vec2(q("1/2"), Q(0)));
}

TEST(Curves, VertexContactIsNotTransverse)
{
    PLCurve v = make_curve(unit(), {{Q(0), q("-1/2")}, {Q(0), Q(0)}, {q("1/2"), q("1/2")}}, {Q(0), Q(1)});
    EXPECT_EQ(kind_of([&] { intersect(alpha(), v); }), "NonTransverse");
    EXPECT_EQ(kind_of([&] { intersect(alpha(), translated(alpha(), {q("1/3"), Q(0)})); }), "NonTransverse");
}

TEST(Curves, StraightVertexCrossingIsAllowed)
{
    PLCurve v = make_curve(unit(), {{q("1/4"), q("-1/2")}, {q("1/4"), Q(0)}}, {Q(0), Q(1)});
    auto x = intersect(alpha(), v);
    ASSERT_EQ(x.size(), 1u);
    EXPECT_EQ(x[0].edge2, 1);
    EXPECT_EQ(x[0].s2, 0);
}

TEST(Curves, IntersectionsMatchBruteForce)
{
    std::mt19937_64 rng(41);
    int nonempty = 0;
    for (int i = 0; i < 30; ++i) {
        FlatSurface t = random_torus(rng);
        PLCurve a = random_curve(t, rng), b = random_curve(t, rng);
        MultiCurve ma{{a}}, mb{{b}};
        std::vector<IntersectionPoint> lib;
        try {
            lib = intersect(ma, mb);
        }
        catch (const Error&) {
            continue;
        }
        std::vector<oracle::Crossing> got;
        for (const auto& x : lib) {
            EXPECT_EQ(a.point(static_cast<std::size_t>(x.edge1), x.s1), x.point);
            EXPECT_EQ(b.point(static_cast<std::size_t>(x.edge2), x.s2) + x.deck, x.point);
            EXPECT_TRUE(t.in_lattice(x.deck));
            got.push_back({x.curve1, x.curve2, oracle::reduce(t, x.point)});
        }
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, oracle::brute_intersections(ma, mb)) << i;
        nonempty += !got.empty();
    }
    EXPECT_GT(nonempty, 10);
}

TEST(Curves, SelfCrossingAndEmbeddedLift)
{
    PLCurve s = make_curve(unit(), {{Q(0), Q(0)}, {q("3/4"), q("1/4")}, {q("1/4"), q("1/4")}}, {Q(1), Q(0)});
    auto x = self_crossings(s);
    ASSERT_EQ(x.size(), 1u);
    EXPECT_EQ(x[0].point, Vec2(q("1/2"), q("1/6")));
    EXPECT_FALSE(embedded_lift_check(s));
    EXPECT_TRUE(traverses_once(s));
    EXPECT_TRUE(embedded_lift_check(gamma()));
    EXPECT_TRUE(self_crossings(gamma()).empty());
}

TEST(Curves, DoubleTraversalIsDetected)
{
    PLCurve twice = make_curve(unit(), {{Q(0), Q(0)}, {Q(1), Q(0)}}, {Q(2), Q(0)});
    EXPECT_FALSE(traverses_once(twice));
    EXPECT_TRUE(traverses_once(alpha()));
}

TEST(Curves, LiftToTwoFoldCover)
{
    FlatSurface f = make_torus({Q(2), Q(0)}, {Q(0), Q(1)});
    CoveringMap cov = covering_from_sublattice(f, unit());
    MultiCurve la = lift_to_cover(alpha(), cov);
    ASSERT_EQ(la.components.size(), 1u);
    EXPECT_EQ(la.components[0].holonomy, Vec2(Q(2), Q(0)));
    EXPECT_EQ(la.components[0].size(), 2u);
    MultiCurve lb = lift_to_cover(beta(), cov);
    ASSERT_EQ(lb.components.size(), 2u);
    EXPECT_EQ(lb.components[0].vertices[0].x, q("1/2"));
    EXPECT_EQ(lb.components[1].vertices[0].x, q("3/2"));
    EXPECT_EQ(lb.components[1].holonomy, Vec2(Q(0), Q(1)));
}

TEST(Curves, LiftsCoverTheCurveDegreeTimes)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10; ++i) {
        Correspondence corr = random_covering_correspondence(rng);
        const CoveringMap& cov = corr.leg1.covering;
        PLCurve c = random_curve(cov.target, rng);
        MultiCurve l = lift_to_cover(c, cov);
        std::size_t edges = 0;
        for (const auto& comp : l.components) {
            edges += comp.size();
            EXPECT_TRUE(cov.target.in_lattice(comp.holonomy));
            EXPECT_TRUE(cov.source.in_lattice(comp.holonomy));
        }
        EXPECT_EQ(edges, c.size() * static_cast<std::size_t>(cov.degree));
    }
}

TEST(Curves, TwistImageIsSubdividedAtBreakpoints)
{
    FlatSurface c = make_cylinder(Q(1), Q(-1), Q(1));
    PLCurve w = make_curve(c, {{Q(0), q("-9/10")}, {q("1/4"), q("9/10")}}, {Q(1), Q(0)});
    PLCurve m = map_curve(w, SelfTwist{dehn_twist_profile(1), 1});
    std::vector<Vec2> want{{Q(0), q("-9/10")}, {q("1/48"), q("-3/4")}, {q("59/48"), q("3/4")},
                           {q("5/4"), q("9/10")}, {q("21/16"), q("3/4")}, {q("15/16"), q("-3/4")}};
    EXPECT_EQ(m.vertices, want);
    EXPECT_EQ(m.holonomy, Vec2(Q(1), Q(0)));
    PLCurve back = map_curve(m, SelfTwist{dehn_twist_profile(1), -1});
    EXPECT_EQ(back.holonomy, w.holonomy);
    EXPECT_EQ(back.vertices.front(), w.vertices.front());
}

TEST(Curves, ReversalAndTranslation)
{
    PLCurve r = reversed(gamma());
    EXPECT_EQ(r.holonomy, Vec2(Q(-1), Q(0)));
    EXPECT_EQ(r.size(), 3u);
    PLCurve t = translated(gamma(), {q("1/10"), Q(0)});
    EXPECT_EQ(t.vertices[0], Vec2(q("2/5"), q("-1/10")));
}
