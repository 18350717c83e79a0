#include "lagcorr/curves.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lagcorr {

Vec2 PLCurve::vertex(long i) const
{
    long k = static_cast<long>(vertices.size());
    long q = i >= 0 ? i / k : -((-i + k - 1) / k);
    long r = i - q * k;
    return vertices[static_cast<std::size_t>(r)] + holonomy * Q(q);
}

Box PLCurve::box() const
{
    Box b = Box::of(vertices);
    return b.unite(Box::of(vertices[0] + holonomy, vertices[0] + holonomy));
}

Q PLCurve::length_estimate() const
{
    // L1 length, exact
    Q len = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        Vec2 d = edge_dir(i);
        len += abs(d.x) + abs(d.y);
    }
    return len;
}

PLCurve make_curve(const FlatSurface& surface, std::vector<Vec2> vertices, const Vec2& holonomy)
{
    if (vertices.empty()) throw Error("ZeroEdge", "curve has no vertices");
    if (!surface.in_lattice(holonomy)) throw Error("NotClosed", "holonomy is not a deck translation of the surface");
    PLCurve c;
    c.surface = surface;
    c.vertices = std::move(vertices);
    c.holonomy = holonomy;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!surface.contains_height(c.vertices[i].y)) throw Error("OutOfCylinder", "vertex outside the cylinder");
        Vec2 d = c.edge_dir(i);
        if (d.is_zero()) throw Error("ZeroEdge", "edge " + std::to_string(i) + " has zero length");
        if (i > 0) {
            Vec2 p = c.edge_dir(i - 1);
            if (sgn(cross(p, d)) == 0 && sgn(dot(p, d)) < 0)
                throw Error("BacktrackingEdge", "edge " + std::to_string(i) + " reverses its predecessor");
        }
    }
    Vec2 last = c.edge_dir(c.size() - 1), first = c.edge_dir(0);
    if (sgn(cross(last, first)) == 0 && sgn(dot(last, first)) < 0)
        throw Error("BacktrackingEdge", "closing edge reverses the first edge");
    return c;
}

namespace {

bool by_order(const IntersectionPoint& a, const IntersectionPoint& b)
{
    if (a.curve1 != b.curve1) return a.curve1 < b.curve1;
    if (a.edge1 != b.edge1) return a.edge1 < b.edge1;
    if (a.s1 != b.s1) return a.s1 < b.s1;
    if (a.curve2 != b.curve2) return a.curve2 < b.curve2;
    if (a.edge2 != b.edge2) return a.edge2 < b.edge2;
    return a.s2 < b.s2;
}

bool straight_vertex(const PLCurve& c, std::size_t i)
{
    Vec2 in = c.edge_dir(i == 0 ? c.size() - 1 : i - 1), out = c.edge_dir(i);
    return sgn(cross(in, out)) == 0 && sgn(dot(in, out)) > 0;
}

void intersect_pair(const PLCurve& a, int ia, const PLCurve& b, int ib, std::vector<IntersectionPoint>& out)
{
    const FlatSurface& surf = a.surface;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Vec2 p0 = a.edge_start(i), p1 = a.edge_end(i);
        Box bi = Box::of(p0, p1);
        for (std::size_t j = 0; j < b.size(); ++j) {
            Vec2 q0 = b.edge_start(j), q1 = b.edge_end(j);
            for (const Vec2& l : surf.deck_in_window(Box::of(q0, q1), bi)) {
                SegIntersection h = intersect_segments(p0, p1, q0 + l, q1 + l);
                if (h.kind == SegHit::None) continue;
                if (h.kind == SegHit::Overlap)
                    throw Error("NonTransverse", "edges overlap along a segment");
                // a hit at an edge end is recorded once, at the start of the
                // next edge, and only where that vertex is not a corner
                if (h.s == 1 || h.u == 1) continue;
                if ((sgn(h.s) == 0 && !straight_vertex(a, i)) || (sgn(h.u) == 0 && !straight_vertex(b, j)))
                    throw Error("NonTransverse", "curves meet at a vertex");
                IntersectionPoint x;
                x.curve1 = ia;
                x.curve2 = ib;
                x.edge1 = static_cast<int>(i);
                x.edge2 = static_cast<int>(j);
                x.s1 = h.s;
                x.s2 = h.u;
                x.point = p0 + (p1 - p0) * h.s;
                x.deck = l;
                out.push_back(std::move(x));
            }
        }
    }
}

// integer k with lambda = k w, if any
bool multiple_of(const Vec2& lambda, const Vec2& w, Q& k)
{
    if (w.is_zero()) {
        if (!lambda.is_zero()) return false;
        k = 0;
        return true;
    }
    if (sgn(cross(lambda, w)) != 0) return false;
    k = sgn(w.x) != 0 ? lambda.x / w.x : lambda.y / w.y;
    return k.get_den() == 1;
}

// Edges i and j + lambda are consecutive on one lift; returns +1 when j
// follows i, -1 when i follows j, 0 otherwise.
int adjacency(const PLCurve& c, std::size_t i, std::size_t j, const Vec2& lambda)
{
    Q k;
    if (!multiple_of(lambda, c.holonomy, k)) return 0;
    long n = static_cast<long>(c.size());
    if (c.holonomy.is_zero()) {
        if ((static_cast<long>(i) + 1) % n == static_cast<long>(j)) return 1;
        if ((static_cast<long>(j) + 1) % n == static_cast<long>(i)) return -1;
        return 0;
    }
    long li = static_cast<long>(i);
    long lj = static_cast<long>(j) + k.get_num().get_si() * n;
    if (lj == li + 1) return 1;
    if (lj == li - 1) return -1;
    return 0;
}

enum class SelfHit { None, Allowed, Crossing, Touch, Overlap };

SelfHit classify_self(const PLCurve& c, std::size_t i, std::size_t j, const Vec2& l, SegIntersection& h)
{
    if (i == j && l.is_zero()) return SelfHit::None;
    h = intersect_segments(c.edge_start(i), c.edge_end(i), c.edge_start(j) + l, c.edge_end(j) + l);
    if (h.kind == SegHit::None) return SelfHit::None;
    int adj = adjacency(c, i, j, l);
    if (adj != 0) {
        // consecutive edges may only share their common endpoint
        Q want_s = adj > 0 ? Q(1) : Q(0);
        if (h.kind == SegHit::Overlap) return h.s == h.u && h.s == want_s ? SelfHit::Allowed : SelfHit::Overlap;
        return h.s == want_s && h.u == Q(1) - want_s ? SelfHit::Allowed : SelfHit::Touch;
    }
    if (h.kind == SegHit::Overlap) return h.s < h.u ? SelfHit::Overlap : SelfHit::Touch;
    if (sgn(h.s) == 0 || h.s == 1 || sgn(h.u) == 0 || h.u == 1) return SelfHit::Touch;
    return SelfHit::Crossing;
}

// translations by multiples of the holonomy that can bring edge j near edge i
std::vector<Vec2> holonomy_window(const PLCurve& c, std::size_t i, std::size_t j)
{
    std::vector<Vec2> out;
    const Vec2& w = c.holonomy;
    if (w.is_zero()) {
        out.push_back(w);
        return out;
    }
    Q ww = dot(w, w);
    auto proj = [&](const Vec2& p) -> Q { return dot(p, w) / ww; };
    Q ai = proj(c.edge_start(i)), bi = proj(c.edge_end(i));
    if (ai > bi) std::swap(ai, bi);
    Q aj = proj(c.edge_start(j)), bj = proj(c.edge_end(j));
    if (aj > bj) std::swap(aj, bj);
    mpz_class lo = floor_q(ai - bj).get_num(), hi = ceil_q(bi - aj).get_num();
    for (mpz_class k = lo; k <= hi; ++k) out.push_back(w * Q(k));
    return out;
}

} // namespace

std::vector<IntersectionPoint> intersect(const MultiCurve& a, const MultiCurve& b)
{
    std::vector<IntersectionPoint> out;
    for (std::size_t i = 0; i < a.components.size(); ++i)
        for (std::size_t j = 0; j < b.components.size(); ++j) {
            if (!(a.components[i].surface == b.components[j].surface))
                throw Error("WrongSurface", "curves live on different surfaces");
            intersect_pair(a.components[i], static_cast<int>(i), b.components[j], static_cast<int>(j), out);
        }
    std::sort(out.begin(), out.end(), by_order);
    return out;
}

std::vector<IntersectionPoint> intersect(const PLCurve& a, const PLCurve& b)
{
    return intersect(MultiCurve{{a}}, MultiCurve{{b}});
}

bool embedded_lift_check(const PLCurve& c)
{
    SegIntersection h;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i; j < c.size(); ++j)
            for (const Vec2& l : holonomy_window(c, i, j)) {
                SelfHit r = classify_self(c, i, j, l, h);
                if (r != SelfHit::None && r != SelfHit::Allowed) return false;
            }
    return true;
}

bool traverses_once(const PLCurve& c)
{
    SegIntersection h;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i; j < c.size(); ++j)
            for (const Vec2& l : c.surface.deck_in_window(Box::of(c.edge_start(j), c.edge_end(j)),
                                                          Box::of(c.edge_start(i), c.edge_end(i))))
                if (classify_self(c, i, j, l, h) == SelfHit::Overlap) return false;
    return true;
}

std::vector<IntersectionPoint> self_crossings(const PLCurve& c)
{
    std::vector<IntersectionPoint> out;
    SegIntersection h;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i; j < c.size(); ++j)
            for (const Vec2& l : c.surface.deck_in_window(Box::of(c.edge_start(j), c.edge_end(j)),
                                                          Box::of(c.edge_start(i), c.edge_end(i)))) {
                SelfHit r = classify_self(c, i, j, l, h);
                if (r == SelfHit::None || r == SelfHit::Allowed) continue;
                if (r != SelfHit::Crossing) throw Error("NonTransverse", "curve touches or overlaps itself");
                if (i == j && !(h.s < h.u)) continue;
                IntersectionPoint x;
                x.edge1 = static_cast<int>(i);
                x.edge2 = static_cast<int>(j);
                x.s1 = h.s;
                x.s2 = h.u;
                x.point = c.point(i, h.s);
                x.deck = l;
                out.push_back(std::move(x));
            }
    std::sort(out.begin(), out.end(), by_order);
    return out;
}

MultiCurve lift_to_cover(const PLCurve& c, const CoveringMap& cov)
{
    if (!(c.surface == cov.target)) throw Error("WrongSurface", "curve is not on the covering target");
    MultiCurve out;
    std::set<Vec2> seen;
    for (const Vec2& d : cov.deck) {
        if (seen.count(d)) continue;
        PLCurve comp;
        comp.surface = cov.source;
        Vec2 shift = d;
        long r = 0;
        do {
            seen.insert(cov.deck_rep(shift));
            for (const Vec2& v : c.vertices) comp.vertices.push_back(v + shift);
            shift += c.holonomy;
            ++r;
        } while (cov.deck_rep(shift) != d);
        comp.holonomy = c.holonomy * Q(r);
        out.components.push_back(std::move(comp));
    }
    return out;
}

std::vector<Vec2> map_path(const FlatSurface& surface, const std::vector<Vec2>& path, const SurfaceSelfMap& f)
{
    std::vector<Vec2> refined;
    if (const auto* tw = std::get_if<SelfTwist>(&f)) {
        if (surface.is_torus()) throw Error("WrongSurface", "twists act on cylinders");
        for (std::size_t i = 0; i < path.size(); ++i) {
            refined.push_back(path[i]);
            if (i + 1 == path.size()) break;
            const Vec2& a = path[i];
            const Vec2& b = path[i + 1];
            std::vector<Q> cuts;
            for (const Q& t : tw->profile.t) {
                if (a.y == b.y) break;
                Q s = (t - a.y) / (b.y - a.y);
                if (sgn(s) > 0 && s < 1) cuts.push_back(s);
            }
            std::sort(cuts.begin(), cuts.end());
            for (const Q& s : cuts) refined.push_back(a + (b - a) * s);
        }
    }
    else {
        refined = path;
    }
    std::vector<Vec2> out;
    out.reserve(refined.size());
    for (const Vec2& p : refined) out.push_back(apply_self_map(f, surface, p));
    return out;
}

PLCurve map_curve(const PLCurve& c, const SurfaceSelfMap& f)
{
    std::vector<Vec2> path = c.vertices;
    path.push_back(c.vertices[0] + c.holonomy);
    std::vector<Vec2> img = map_path(c.surface, path, f);
    Vec2 hol = img.back() - img.front();
    img.pop_back();
    return make_curve(c.surface, std::move(img), hol);
}

PLCurve reversed(const PLCurve& c)
{
    PLCurve r;
    r.surface = c.surface;
    r.holonomy = -c.holonomy;
    r.vertices.push_back(c.vertices[0]);
    for (std::size_t j = 1; j < c.size(); ++j) r.vertices.push_back(c.vertices[c.size() - j] - c.holonomy);
    return r;
}

PLCurve translated(const PLCurve& c, const Vec2& v)
{
    PLCurve r = c;
    for (auto& p : r.vertices) p += v;
    return r;
}

} // namespace lagcorr
