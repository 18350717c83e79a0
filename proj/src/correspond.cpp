#include "lagcorr/correspond.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>

namespace lagcorr {

Q CorrLeg::shift(const Q& t) const
{
    if (kind != Kind::FoldTwist || !twist) return 0;
    return (*twist)(t) * fold.source.circumference / 2;
}

double CorrLeg::shift(double t) const
{
    if (kind != Kind::FoldTwist || !twist) return 0.0;
    return twist->eval(t) * fold.source.circumference.get_d() / 2.0;
}

Vec2 CorrLeg::apply(const Vec2& x) const
{
    if (kind == Kind::Covering) return x;
    return {x.x + shift(x.y), x.y * x.y};
}

CorrLeg covering_leg(const CoveringMap& cov)
{
    CorrLeg g;
    g.kind = CorrLeg::Kind::Covering;
    g.covering = cov;
    return g;
}

CorrLeg fold_leg(const Q& circumference, std::optional<TwistProfile> twist)
{
    CorrLeg g;
    g.kind = CorrLeg::Kind::FoldTwist;
    g.fold = make_fold(circumference);
    g.twist = std::move(twist);
    return g;
}

namespace {

// one-sided slopes of the theta offset at t = 0
std::pair<Q, Q> shift_slopes_at_zero(const CorrLeg& g)
{
    if (!g.twist) return {Q(0), Q(0)};
    const TwistProfile& p = *g.twist;
    Q left = 0;
    for (std::size_t i = 0; i + 1 < p.t.size(); ++i)
        if (sgn(p.t[i]) < 0 && sgn(p.t[i + 1]) >= 0) left = (p.m[i + 1] - p.m[i]) / (p.t[i + 1] - p.t[i]);
    Q half = g.fold.source.circumference / 2;
    return {left * half, p.slope_at(Q(0)) * half};
}

} // namespace

Correspondence make_correspondence(CorrLeg leg1, CorrLeg leg2)
{
    if (leg1.kind != leg2.kind)
        throw Error("InvalidCorrespondence", "a covering leg cannot be paired with a folding leg");
    if (!(leg1.source() == leg2.source())) throw Error("InvalidCorrespondence", "legs start on different surfaces");
    if (leg1.kind == CorrLeg::Kind::FoldTwist) {
        auto a = shift_slopes_at_zero(leg1);
        auto b = shift_slopes_at_zero(leg2);
        if (a.first == b.first || a.second == b.second)
            throw Error("InvalidCorrespondence", "twist profiles must differ to first order at t = 0");
    }
    Correspondence c;
    c.domain = leg1.source();
    c.leg1 = std::move(leg1);
    c.leg2 = std::move(leg2);
    return c;
}

namespace {

Composition compose_covering(const PLCurve& l, const CorrLeg& near, const CorrLeg& far)
{
    Composition out;
    out.preimage = lift_to_cover(l, near.covering);
    for (std::size_t i = 0; i < out.preimage.components.size(); ++i) {
        const PLCurve& p = out.preimage.components[i];
        out.curves.components.push_back(make_curve(far.target(), p.vertices, p.holonomy));
        out.origin.push_back({static_cast<int>(i), std::vector<int>(p.size(), 0)});
    }
    return out;
}

struct FoldSample {
    Vec2 p;  // point of the input curve
    Q t;     // approximate sqrt of p.y
};

class FoldComposer {
public:
    FoldComposer(const CorrLeg& near, const CorrLeg& far, const Q& tau) : near_(near), far_(far), tau_(tau)
    {
        k_ = 0;
        while (Q(1, mpz_class(1) << k_) > tau / 16) ++k_;
        for (const CorrLeg* g : {&near, &far})
            if (g->twist)
                for (const Q& b : g->twist->t) squares_.push_back(b * b);
    }

    // samples from a to b (a included, b excluded)
    void refine(const Vec2& a, const Vec2& b, std::vector<FoldSample>& out) const
    {
        std::vector<Q> cuts{Q(0), Q(1)};
        if (a.y != b.y)
            for (const Q& s2 : squares_) {
                Q l = (s2 - a.y) / (b.y - a.y);
                if (sgn(l) > 0 && l < 1) cuts.push_back(l);
            }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<Q> ls;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) subdivide(a, b, cuts[i], cuts[i + 1], 0, ls);
        for (const Q& l : ls) {
            Vec2 p = a + (b - a) * l;
            if (sgn(p.y) < 0) p.y = 0;
            out.push_back({p, sqrt_dyadic(p.y, k_)});
        }
    }

    Vec2 preimage(const FoldSample& s, int sheet) const
    {
        Q t = sheet > 0 ? s.t : Q(-s.t);
        return {s.p.x - near_.shift(t), t};
    }

private:
    std::array<double, 2> X(const Vec2& a, const Vec2& b, double l, int sheet, bool image) const
    {
        double th = a.x.get_d() + l * (b.x.get_d() - a.x.get_d());
        double s = a.y.get_d() + l * (b.y.get_d() - a.y.get_d());
        double t = sheet * std::sqrt(std::max(s, 0.0));
        double x = th - near_.shift(t);
        if (!image) return {x, t};
        return {x + far_.shift(t), t * t};
    }

    // pushes l0 and the interior subdivision points of [l0, l1]
    void subdivide(const Vec2& a, const Vec2& b, const Q& l0, const Q& l1, int depth, std::vector<Q>& ls) const
    {
        double x0 = l0.get_d(), x1 = l1.get_d();
        double tol = tau_.get_d() / 2;
        bool fine = true;
        for (int sheet : {1, -1})
            for (bool image : {false, true}) {
                auto p0 = X(a, b, x0, sheet, image), p1 = X(a, b, x1, sheet, image);
                for (double f : {0.25, 0.5, 0.75}) {
                    auto q = X(a, b, x0 + f * (x1 - x0), sheet, image);
                    double cx = p0[0] + f * (p1[0] - p0[0]) - q[0];
                    double cy = p0[1] + f * (p1[1] - p0[1]) - q[1];
                    if (std::hypot(cx, cy) > tol) fine = false;
                }
            }
        if (fine || depth >= 56) {
            ls.push_back(l0);
            return;
        }
        Q mid = (l0 + l1) / 2;
        subdivide(a, b, l0, mid, depth + 1, ls);
        subdivide(a, b, mid, l1, depth + 1, ls);
    }

    const CorrLeg& near_;
    const CorrLeg& far_;
    Q tau_;
    unsigned k_;
    std::vector<Q> squares_;
};

// Drops samples whose preimage or image repeats the previous one.
void push_vertex(std::vector<Vec2>& xs, std::vector<Vec2>& ys, std::vector<int>& sheets, Vec2 x, Vec2 y, int sheet)
{
    if (!xs.empty() && (xs.back() == x || ys.back() == y)) return;
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
    sheets.push_back(sheet);
}

void add_component(Composition& out, const CorrLeg& near, const CorrLeg& far, std::vector<Vec2> xs,
                   std::vector<Vec2> ys, std::vector<int> sheets, const Vec2& hol, int arc)
{
    if (xs.size() > 1 && (xs.back() == xs.front() + hol || ys.back() == ys.front() + hol)) {
        xs.pop_back();
        ys.pop_back();
        sheets.pop_back();
    }
    try {
        out.preimage.components.push_back(make_curve(near.source(), std::move(xs), hol));
        out.curves.components.push_back(make_curve(far.target(), std::move(ys), hol));
    }
    catch (const Error& e) {
        throw Error("NotComposable", std::string("degenerate fold preimage: ") + e.what());
    }
    out.origin.push_back({arc, std::move(sheets)});
}

Composition compose_fold(const PLCurve& l, const CorrLeg& near, const CorrLeg& far, const Q& tau)
{
    if (sgn(tau) <= 0) throw Error("InvalidTolerance", "fold tolerance must be positive");
    Composition out;
    out.exact = false;
    out.tolerance = tau;
    long n = static_cast<long>(l.size());

    // crossings of s = 0, in order along one period
    struct Event {
        long edge;
        Q lambda;
    };
    std::vector<Event> events;
    for (long i = 0; i < n; ++i) {
        Q a = l.vertex(i).y, b = l.vertex(i + 1).y;
        if (sgn(a) == 0 && sgn(b) == 0) throw Error("NotComposable", "an edge runs along the fold image");
        if (sgn(a) == 0) {
            Q prev = l.vertex(i - 1).y;
            if (sgn(prev) == sgn(b)) throw Error("NotComposable", "curve is tangent to the fold image");
            events.push_back({i, Q(0)});
        }
        else if (sgn(a) * sgn(b) < 0) {
            events.push_back({i, a / (a - b)});
        }
    }
    FoldComposer fc(near, far, tau);
    auto point = [&](long e, const Q& lam) { return l.vertex(e) + (l.vertex(e + 1) - l.vertex(e)) * lam; };

    if (events.empty()) {
        if (sgn(l.vertices[0].y) < 0) return out;
        std::vector<FoldSample> samples;
        for (long i = 0; i < n; ++i) fc.refine(l.vertex(i), l.vertex(i + 1), samples);
        for (int sheet : {1, -1}) {
            std::vector<Vec2> xs, ys;
            std::vector<int> sh;
            for (const auto& s : samples) {
                Vec2 x = fc.preimage(s, sheet);
                push_vertex(xs, ys, sh, x, far.apply(x), sheet);
            }
            add_component(out, near, far, std::move(xs), std::move(ys), std::move(sh), l.holonomy, 0);
        }
        return out;
    }

    int arc = 0;
    for (std::size_t j = 0; j < events.size(); ++j) {
        const Event& e0 = events[j];
        Event e1 = j + 1 < events.size() ? events[j + 1] : Event{events[0].edge + n, events[0].lambda};
        Vec2 start = point(e0.edge, e0.lambda);
        Vec2 up = l.vertex(e0.edge + 1) - l.vertex(e0.edge);
        if (sgn(up.y) < 0) continue;  // arc below the fold image
        std::vector<Vec2> pts{start};
        for (long m = e0.edge + 1; m <= e1.edge; ++m)
            if (!(m == e1.edge && sgn(e1.lambda) == 0)) pts.push_back(l.vertex(m));
        pts.push_back(point(e1.edge, e1.lambda));
        std::vector<FoldSample> samples;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) fc.refine(pts[i], pts[i + 1], samples);
        samples.push_back({pts.back(), Q(0)});
        samples.front().t = 0;

        std::vector<Vec2> xs, ys;
        std::vector<int> sh;
        // the edge leaving the far turning point already runs on the - sheet
        for (std::size_t i = 0; i < samples.size(); ++i) {
            Vec2 x = fc.preimage(samples[i], 1);
            push_vertex(xs, ys, sh, x, far.apply(x), i + 1 < samples.size() ? 1 : -1);
        }
        for (std::size_t i = samples.size() - 1; i-- > 1;) {
            Vec2 x = fc.preimage(samples[i], -1);
            push_vertex(xs, ys, sh, x, far.apply(x), -1);
        }
        add_component(out, near, far, std::move(xs), std::move(ys), std::move(sh), Vec2{}, arc++);
    }
    return out;
}

Composition compose_through(const PLCurve& l, const CorrLeg& near, const CorrLeg& far, const Q& tau)
{
    if (!(l.surface == near.target())) throw Error("WrongSurface", "curve is not on the target of the leg");
    if (near.kind == CorrLeg::Kind::Covering) return compose_covering(l, near, far);
    return compose_fold(l, near, far, tau);
}

} // namespace

Composition compose_left(const PLCurve& l1, const Correspondence& corr, const Q& tau)
{
    return compose_through(l1, corr.leg1, corr.leg2, tau);
}

Composition compose_right(const Correspondence& corr, const PLCurve& l2, const Q& tau)
{
    return compose_through(l2, corr.leg2, corr.leg1, tau);
}

QuiltedGenerators quilted_generators(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2, const Q& tau)
{
    QuiltedGenerators q;
    q.left = compose_left(l1, corr, tau);
    q.right = compose_right(corr, l2, tau);
    q.exact = corr.is_covering();
    for (auto& x : intersect(q.left.preimage, q.right.preimage)) {
        Triple t;
        t.image1 = corr.leg1.apply(x.point);
        t.image2 = corr.leg2.apply(x.point);
        t.sheet = corr.is_covering() ? 0 : sgn(x.point.y);
        t.x = std::move(x);
        q.triples.push_back(std::move(t));
    }
    const FlatSurface& f1 = corr.leg1.target();
    std::stable_sort(q.triples.begin(), q.triples.end(), [&](const Triple& a, const Triple& b) {
        Vec2 ra = f1.reduce(a.image1), rb = f1.reduce(b.image1);
        if (ra != rb) return ra < rb;
        if (a.x.curve1 != b.x.curve1) return a.x.curve1 < b.x.curve1;
        return a.x.curve2 < b.x.curve2;
    });
    return q;
}

namespace {

using Key = std::tuple<int, int, Q, int, int, Q>;

Key key_of(const IntersectionPoint& p) { return {p.curve1, p.edge1, p.s1, p.curve2, p.edge2, p.s2}; }

// assigns every triple to the generator selected by pick; checks that the
// assignment is a bijection
bool match_all(std::size_t triples, std::size_t gens, const std::function<int(std::size_t)>& pick,
               std::vector<int>& to, std::string& problem, const char* side)
{
    to.assign(triples, -1);
    std::vector<int> hit(gens, 0);
    for (std::size_t k = 0; k < triples; ++k) {
        int g = pick(k);
        if (g < 0) {
            problem = std::string("triple ") + std::to_string(k) + " has no partner among the " + side + " generators";
            return false;
        }
        if (hit[static_cast<std::size_t>(g)]++) {
            problem = std::string(side) + " generator " + std::to_string(g) + " is hit twice";
            return false;
        }
        to[k] = g;
    }
    if (triples != gens) {
        problem = std::string("generator counts differ on the ") + side + " side";
        return false;
    }
    return true;
}

double periodic_distance(const FlatSurface& f, const Vec2& a, const Vec2& b)
{
    double dx = a.x.get_d() - b.x.get_d(), dy = a.y.get_d() - b.y.get_d();
    if (!f.is_torus()) {
        double c = f.circumference.get_d();
        dx -= c * std::round(dx / c);
    }
    return std::hypot(dx, dy);
}

} // namespace

Bijection generator_bijection(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2, const Q& tau)
{
    Bijection b;
    b.quilt = quilted_generators(l1, corr, l2, tau);
    b.exact = b.quilt.exact;
    b.left = intersect(b.quilt.left.curves, MultiCurve{{l2}});
    b.right = intersect(MultiCurve{{l1}}, b.quilt.right.curves);
    const auto& tr = b.quilt.triples;

    if (corr.is_covering()) {
        std::map<Key, int> left_index, right_index;
        for (std::size_t i = 0; i < b.left.size(); ++i) left_index[key_of(b.left[i])] = static_cast<int>(i);
        for (std::size_t i = 0; i < b.right.size(); ++i) right_index[key_of(b.right[i])] = static_cast<int>(i);
        long k1 = static_cast<long>(l1.size()), k2 = static_cast<long>(l2.size());
        auto pick_left = [&](std::size_t k) {
            const auto& x = tr[k].x;
            auto it = left_index.find({x.curve1, x.edge1, x.s1, 0, static_cast<int>(x.edge2 % k2), x.s2});
            return it == left_index.end() ? -1 : it->second;
        };
        auto pick_right = [&](std::size_t k) {
            const auto& x = tr[k].x;
            auto it = right_index.find({0, static_cast<int>(x.edge1 % k1), x.s1, x.curve2, x.edge2, x.s2});
            return it == right_index.end() ? -1 : it->second;
        };
        b.valid = match_all(tr.size(), b.left.size(), pick_left, b.to_left, b.problem, "left") &&
                  match_all(tr.size(), b.right.size(), pick_right, b.to_right, b.problem, "right");
        return b;
    }

    // fold scenarios: match by position on the domain, nearest partner on the
    // same composed component, within a radius
    const FlatSurface& dom = corr.domain;
    double radius = 10.0 * std::sqrt(tau.get_d());
    auto nearest = [&](std::size_t k, const std::vector<IntersectionPoint>& gens, bool left) {
        int best = -1;
        double bd = radius;
        for (std::size_t g = 0; g < gens.size(); ++g) {
            const auto& p = gens[g];
            int comp = left ? p.curve1 : p.curve2;
            if (comp != (left ? tr[k].x.curve1 : tr[k].x.curve2)) continue;
            const PLCurve& pre = left ? b.quilt.left.preimage.components[static_cast<std::size_t>(comp)]
                                      : b.quilt.right.preimage.components[static_cast<std::size_t>(comp)];
            Vec2 x = left ? pre.point(static_cast<std::size_t>(p.edge1), p.s1)
                          : pre.point(static_cast<std::size_t>(p.edge2), p.s2);
            double d = periodic_distance(dom, x, tr[k].x.point);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(g);
            }
        }
        return best;
    };
    b.valid = match_all(tr.size(), b.left.size(), [&](std::size_t k) { return nearest(k, b.left, true); },
                        b.to_left, b.problem, "left") &&
              match_all(tr.size(), b.right.size(), [&](std::size_t k) { return nearest(k, b.right, false); },
                        b.to_right, b.problem, "right");
    return b;
}

std::vector<DomainCircle> bisingular_circles(const Correspondence& corr)
{
    if (corr.is_covering()) return {};
    return {{corr.domain, Q(0)}};
}

bool point_on_curve(const MultiCurve& c, const Vec2& p)
{
    for (const auto& comp : c.components)
        for (std::size_t i = 0; i < comp.size(); ++i) {
            Vec2 a = comp.edge_start(i), e = comp.edge_end(i);
            Box eb = Box::of(a, e);
            for (const Vec2& l : comp.surface.deck_in_window(Box::of(p, p), eb)) {
                Vec2 q = p + l;
                if (eb.contains(q) && orient(a, e, q) == 0) return true;
            }
        }
    return false;
}

} // namespace lagcorr
