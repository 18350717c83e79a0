#include "lagcorr/floer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace lagcorr {

namespace {

// a crossing of the lifts A~ (canonical) and B~ + mu, located by unrolled
// edge parameters alpha = E + s on A~ and beta = F + u on B~ + mu
struct Lifted {
    int gen = 0;
    long ea = 0, eb = 0;
    Q sa, sb;
    Q alpha, beta;
    Vec2 point;
};

// integer (j, k) with j wa - k wb = delta; parallel holonomies give the
// solutions with |j| <= span
std::vector<std::pair<long, long>> lattice_solutions(const Vec2& wa, const Vec2& wb, const Vec2& delta, long span)
{
    std::vector<std::pair<long, long>> out;
    bool za = wa.is_zero(), zb = wb.is_zero();
    auto integral = [](const Q& q) { return q.get_den() == 1; };
    if (za && zb) {
        if (delta.is_zero()) out.push_back({0, 0});
        return out;
    }
    if (za || zb) {
        const Vec2& w = za ? wb : wa;
        if (sgn(cross(delta, w)) != 0) return out;
        Q r = sgn(w.x) != 0 ? delta.x / w.x : delta.y / w.y;
        if (!integral(r)) return out;
        long v = r.get_num().get_si();
        if (za) out.push_back({0, -v});
        else out.push_back({v, 0});
        return out;
    }
    Q den = cross(wa, wb);
    if (sgn(den) != 0) {
        Q j = cross(delta, wb) / den;
        Q k = cross(delta, wa) / den;
        if (integral(j) && integral(k)) out.push_back({j.get_num().get_si(), k.get_num().get_si()});
        return out;
    }
    // wb = rho wa, delta = d wa
    if (sgn(cross(delta, wa)) != 0) return out;
    Q rho = sgn(wa.x) != 0 ? wb.x / wa.x : wb.y / wa.y;
    Q d = sgn(wa.x) != 0 ? delta.x / wa.x : delta.y / wa.y;
    for (long j = -span; j <= span; ++j) {
        Q k = (Q(j) - d) / rho;
        if (integral(k)) out.push_back({j, k.get_num().get_si()});
    }
    return out;
}

// strictly inside the arc from a to b in direction dir; period 0 for open lifts
bool inside_arc(const Q& x, const Q& a, const Q& b, int dir, long period)
{
    if (period == 0) return dir > 0 ? (a < x && x < b) : (b < x && x < a);
    Q p(period);
    auto wrap = [&](Q v) {
        v -= floor_q(v / p) * p;
        return v;
    };
    Q d = wrap((x - a) * dir), len = wrap((b - a) * dir);
    return sgn(d) > 0 && d < len;
}

// unrolled end parameter for walking from a to b in direction dir
long arc_end_edge(const Q& a, long eb, const Q& b, int dir, long period)
{
    if (period == 0) return eb;
    if (dir > 0 && b < a) return eb + period;
    if (dir < 0 && b > a) return eb - period;
    return eb;
}

std::vector<Vec2> arc_path(const PLCurve& c, const Vec2& shift, long e0, const Vec2& p0, long e1, const Vec2& p1,
                           int dir)
{
    std::vector<Vec2> out{p0};
    auto push = [&](Vec2 v) {
        if (v != out.back()) out.push_back(std::move(v));
    };
    if (dir > 0)
        for (long i = e0 + 1; i <= e1; ++i) push(c.vertex(i) + shift);
    else
        for (long i = e0; i > e1; --i) push(c.vertex(i) + shift);
    push(p1);
    return out;
}

Q twice_area(const std::vector<Vec2>& poly)
{
    Q a = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return a;
}

Vec2 edge_dir_unrolled(const PLCurve& c, long e)
{
    long n = static_cast<long>(c.size());
    long r = ((e % n) + n) % n;
    return c.edge_dir(static_cast<std::size_t>(r));
}

void bigons_for_pair(const PLCurve& A, int ia, const PLCurve& B, int ib, const std::vector<IntersectionPoint>& gens,
                     const std::vector<int>& idx, std::vector<Bigon>& out)
{
    long na = static_cast<long>(A.size()), nb = static_cast<long>(B.size());
    const Vec2& wa = A.holonomy;
    const Vec2& wb = B.holonomy;
    // parallel holonomies: lifts are periodic under a common period of
    // |num(rho)| steps of A, and a lune spans less than one period
    long span = 1;
    bool parallel = !wa.is_zero() && !wb.is_zero() && sgn(cross(wa, wb)) == 0;
    if (parallel) {
        Q rho = sgn(wa.x) != 0 ? wb.x / wa.x : wb.y / wa.y;
        span = mpz_class(abs(rho.get_num())).get_si() + 1;
    }
    long pa = wa.is_zero() ? na : 0, pb = wb.is_zero() ? nb : 0;

    for (int g : idx) {
        const IntersectionPoint& pg = gens[static_cast<std::size_t>(g)];
        const Vec2& mu = pg.deck;
        std::vector<Lifted> lifts;
        for (int h : idx) {
            const IntersectionPoint& ph = gens[static_cast<std::size_t>(h)];
            for (auto [j, k] : lattice_solutions(wa, wb, mu - ph.deck, span)) {
                Lifted l;
                l.gen = h;
                l.ea = ph.edge1 + j * na;
                l.eb = ph.edge2 + k * nb;
                l.sa = ph.s1;
                l.sb = ph.s2;
                l.alpha = Q(l.ea) + l.sa;
                l.beta = Q(l.eb) + l.sb;
                l.point = ph.point + wa * Q(j);
                lifts.push_back(std::move(l));
            }
        }
        Q alpha_p = Q(pg.edge1) + pg.s1, beta_p = Q(pg.edge2) + pg.s2;
        Q period_span = Q(na) * Q(span - 1);
        for (const Lifted& q : lifts) {
            if (q.alpha == alpha_p || q.beta == beta_p) continue;
            if (parallel && abs(q.alpha - alpha_p) > period_span) continue;
            std::vector<int> da, db;
            if (pa == 0) da.push_back(q.alpha > alpha_p ? 1 : -1);
            else da = {1, -1};
            if (pb == 0) db.push_back(q.beta > beta_p ? 1 : -1);
            else db = {1, -1};
            for (int dA : da)
                for (int dB : db) {
                    bool clean = true;
                    for (const Lifted& r : lifts) {
                        if (&r == &q || (r.alpha == alpha_p && r.beta == beta_p)) continue;
                        if (inside_arc(r.alpha, alpha_p, q.alpha, dA, pa) && inside_arc(r.beta, beta_p, q.beta, dB, pb)) {
                            clean = false;
                            break;
                        }
                    }
                    if (!clean) continue;
                    long ea1 = arc_end_edge(alpha_p, q.ea, q.alpha, dA, pa);
                    long eb1 = arc_end_edge(beta_p, q.eb, q.beta, dB, pb);
                    std::vector<Vec2> a1 = arc_path(A, Vec2{}, pg.edge1, pg.point, ea1, q.point, dA);
                    std::vector<Vec2> a2 = arc_path(B, mu, pg.edge2, pg.point, eb1, q.point, dB);
                    // A1 from p to q, then A2 back to p
                    std::vector<Vec2> poly = a1;
                    for (std::size_t i = a2.size() - 1; i-- > 1;) poly.push_back(a2[i]);
                    int area = sgn(twice_area(poly));
                    if (area >= 0) continue;  // p is not the outgoing corner
                    Vec2 ta_p = edge_dir_unrolled(A, pg.edge1) * Q(dA), tb_p = edge_dir_unrolled(B, pg.edge2) * Q(dB);
                    Vec2 ta_q = edge_dir_unrolled(A, q.ea) * Q(dA), tb_q = edge_dir_unrolled(B, q.eb) * Q(dB);
                    int turn_p = sgn(cross(-tb_p, ta_p));
                    int turn_q = sgn(cross(ta_q, -tb_q));
                    if (turn_p != area || turn_q != area) continue;
                    Bigon bg;
                    bg.from = g;
                    bg.to = q.gen;
                    bg.curve1 = ia;
                    bg.curve2 = ib;
                    bg.arc1 = std::move(a1);
                    bg.arc2 = a2;
                    bg.polygon = std::move(a2);
                    for (std::size_t i = bg.arc1.size() - 1; i-- > 1;) bg.polygon.push_back(bg.arc1[i]);
                    out.push_back(std::move(bg));
                }
        }
    }
}

bool bigon_order(const Bigon& a, const Bigon& b)
{
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.polygon < b.polygon;
}

void require_embedded(const MultiCurve& c)
{
    for (const auto& comp : c.components)
        if (!embedded_lift_check(comp)) throw Error("NotEmbeddedLift", "a curve component has a non-embedded lift");
}

} // namespace

std::vector<Bigon> enumerate_bigons(const MultiCurve& c1, const MultiCurve& c2,
                                    const std::vector<IntersectionPoint>& generators)
{
    std::map<std::pair<int, int>, std::vector<int>> by_pair;
    for (std::size_t i = 0; i < generators.size(); ++i)
        by_pair[{generators[i].curve1, generators[i].curve2}].push_back(static_cast<int>(i));
    std::vector<Bigon> out;
    for (const auto& [key, idx] : by_pair)
        bigons_for_pair(c1.components[static_cast<std::size_t>(key.first)], key.first,
                        c2.components[static_cast<std::size_t>(key.second)], key.second, generators, idx, out);
    std::sort(out.begin(), out.end(), bigon_order);
    return out;
}

std::vector<Bigon> enumerate_bigons(const MultiCurve& c1, const MultiCurve& c2)
{
    require_embedded(c1);
    require_embedded(c2);
    return enumerate_bigons(c1, c2, intersect(c1, c2));
}

FloerComplex differential(const MultiCurve& c1, const MultiCurve& c2)
{
    require_embedded(c1);
    require_embedded(c2);
    FloerComplex fc;
    if (!c1.components.empty()) fc.surface = c1.components.front().surface;
    fc.c1 = c1;
    fc.c2 = c2;
    fc.generators = intersect(c1, c2);
    fc.bigons = enumerate_bigons(c1, c2, fc.generators);
    std::size_t n = fc.generators.size();
    fc.matrix.assign(n, std::vector<std::uint8_t>(n, 0));
    for (const Bigon& b : fc.bigons)
        fc.matrix[static_cast<std::size_t>(b.to)][static_cast<std::size_t>(b.from)] ^= 1;
    return fc;
}

FloerComplex differential(const PLCurve& c1, const PLCurve& c2)
{
    return differential(MultiCurve{{c1}}, MultiCurve{{c2}});
}

Matrix multiply_mod2(const Matrix& a, const Matrix& b)
{
    std::size_t n = a.size();
    Matrix out(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < n; ++j) out[i][j] ^= b[k][j];
    return out;
}

bool squares_to_zero(const FloerComplex& c)
{
    for (const auto& row : multiply_mod2(c.matrix, c.matrix))
        for (auto v : row)
            if (v) return false;
    return true;
}

namespace {

void check_misses_self_intersections(const MultiCurve& lifted1, const MultiCurve& lifted2)
{
    std::vector<Vec2> points;
    for (const auto& comp : lifted2.components)
        for (const auto& x : self_crossings(comp)) points.push_back(x.point);
    for (std::size_t i = 0; i < lifted2.components.size(); ++i)
        for (std::size_t j = i + 1; j < lifted2.components.size(); ++j)
            for (const auto& x : intersect(lifted2.components[i], lifted2.components[j])) points.push_back(x.point);
    for (const Vec2& p : points)
        if (point_on_curve(lifted1, p))
            throw Error("HypothesisViolated", "the lifted first curve passes through a self-intersection of the lifted second curve");
}

std::vector<int> flag_bigons(const FloerComplex& c)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < c.bigons.size(); ++i) {
        bool meets = false;
        for (const Vec2& v : c.bigons[i].polygon)
            if (sgn(v.y) <= 0) meets = true;
        if (meets) out.push_back(static_cast<int>(i));
    }
    return out;
}

} // namespace

ComparisonReport compare_complexes(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2)
{
    if (!corr.is_covering())
        throw Error("CoveringRequired", "complex comparison needs both legs to be covering maps");
    ComparisonReport r;
    r.bijection = generator_bijection(l1, corr, l2);
    const auto& quilt = r.bijection.quilt;
    check_misses_self_intersections(quilt.left.preimage, quilt.right.preimage);
    r.left = differential(quilt.left.curves, MultiCurve{{l2}});
    r.right = differential(MultiCurve{{l1}}, quilt.right.curves);
    r.lifted = differential(quilt.left.preimage, quilt.right.preimage);
    if (!r.bijection.valid) return r;

    std::map<std::tuple<int, int, Q, int, int, Q>, int> lifted_index;
    for (std::size_t i = 0; i < r.lifted.generators.size(); ++i) {
        const auto& x = r.lifted.generators[i];
        lifted_index[{x.curve1, x.edge1, x.s1, x.curve2, x.edge2, x.s2}] = static_cast<int>(i);
    }
    std::vector<int> to_lifted;
    for (const auto& t : quilt.triples) {
        const auto& x = t.x;
        auto it = lifted_index.find({x.curve1, x.edge1, x.s1, x.curve2, x.edge2, x.s2});
        if (it == lifted_index.end()) {
            r.bijection.valid = false;
            r.bijection.problem = "triple missing from the lifted complex";
            return r;
        }
        to_lifted.push_back(it->second);
    }
    std::size_t n = quilt.triples.size();
    r.agree = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            EntryComparison e;
            e.row = static_cast<int>(k);
            e.col = static_cast<int>(l);
            e.left = r.left.matrix[static_cast<std::size_t>(r.bijection.to_left[k])]
                                  [static_cast<std::size_t>(r.bijection.to_left[l])];
            e.right = r.right.matrix[static_cast<std::size_t>(r.bijection.to_right[k])]
                                    [static_cast<std::size_t>(r.bijection.to_right[l])];
            e.lifted = r.lifted.matrix[static_cast<std::size_t>(to_lifted[k])][static_cast<std::size_t>(to_lifted[l])];
            if (e.left != e.right || e.left != e.lifted) {
                r.agree = false;
                r.disagreements.push_back(e);
            }
            r.entries.push_back(e);
        }
    return r;
}

ComparisonReport conjecture_report(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2, const Q& tau)
{
    if (corr.is_covering()) throw Error("InvalidCorrespondence", "the conjecture report needs folding legs");
    ComparisonReport r;
    r.exact = false;
    r.restricted = true;
    r.bijection = generator_bijection(l1, corr, l2, tau);
    const auto& quilt = r.bijection.quilt;
    r.left = differential(quilt.left.curves, MultiCurve{{l2}});
    r.right = differential(MultiCurve{{l1}}, quilt.right.curves);
    for (FloerComplex* c : {&r.left, &r.right}) {
        c->exact = false;
        c->tolerance = tau;
    }
    r.flagged_left = flag_bigons(r.left);
    r.flagged_right = flag_bigons(r.right);
    if (!r.bijection.valid) return r;

    auto entry_flagged = [](const FloerComplex& c, const std::vector<int>& flagged, int row, int col) {
        for (int i : flagged) {
            const Bigon& b = c.bigons[static_cast<std::size_t>(i)];
            if (b.to == row && b.from == col) return true;
        }
        return false;
    };
    std::size_t n = quilt.triples.size();
    r.agree = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            EntryComparison e;
            e.row = static_cast<int>(k);
            e.col = static_cast<int>(l);
            int lr = r.bijection.to_left[k], lc = r.bijection.to_left[l];
            int rr = r.bijection.to_right[k], rc = r.bijection.to_right[l];
            e.left = r.left.matrix[static_cast<std::size_t>(lr)][static_cast<std::size_t>(lc)];
            e.right = r.right.matrix[static_cast<std::size_t>(rr)][static_cast<std::size_t>(rc)];
            e.flagged = entry_flagged(r.left, r.flagged_left, lr, lc) || entry_flagged(r.right, r.flagged_right, rr, rc);
            if (!e.flagged && e.left != e.right) {
                r.agree = false;
                r.disagreements.push_back(e);
            }
            r.entries.push_back(e);
        }
    return r;
}

void write_csv(const FloerComplex& c, std::ostream& out)
{
    out << "generator,curve1,edge1,s1,curve2,edge2,s2,x,y\n";
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
        const auto& g = c.generators[i];
        out << i << ',' << g.curve1 << ',' << g.edge1 << ',' << to_string(g.s1) << ',' << g.curve2 << ','
            << g.edge2 << ',' << to_string(g.s2) << ',' << to_string(g.point.x) << ',' << to_string(g.point.y)
            << '\n';
    }
    out << "\nrow\\col";
    for (std::size_t j = 0; j < c.size(); ++j) out << ',' << j;
    out << '\n';
    for (std::size_t i = 0; i < c.size(); ++i) {
        out << i;
        for (std::size_t j = 0; j < c.size(); ++j) out << ',' << static_cast<int>(c.matrix[i][j]);
        out << '\n';
    }
}

void write_svg(const FloerComplex& c, std::ostream& out)
{
    std::vector<std::vector<Vec2>> paths1, paths2;
    auto collect = [](const MultiCurve& m, std::vector<std::vector<Vec2>>& paths) {
        for (const auto& comp : m.components) {
            std::vector<Vec2> p = comp.vertices;
            p.push_back(comp.vertices.front() + comp.holonomy);
            paths.push_back(std::move(p));
        }
    };
    collect(c.c1, paths1);
    collect(c.c2, paths2);
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto extend = [&](const Vec2& v) {
        x0 = std::min(x0, v.x.get_d());
        x1 = std::max(x1, v.x.get_d());
        y0 = std::min(y0, v.y.get_d());
        y1 = std::max(y1, v.y.get_d());
    };
    for (const auto* ps : {&paths1, &paths2})
        for (const auto& p : *ps)
            for (const auto& v : p) extend(v);
    for (const auto& b : c.bigons)
        for (const auto& v : b.polygon) extend(v);
    if (x0 > x1) x0 = y0 = 0, x1 = y1 = 1;
    double w = std::max(x1 - x0, 1e-9), h = std::max(y1 - y0, 1e-9);
    double scale = 560.0 / std::max(w, h);
    auto px = [&](const Vec2& v) {
        std::ostringstream s;
        s << 20 + (v.x.get_d() - x0) * scale << ',' << 20 + (y1 - v.y.get_d()) * scale;
        return s.str();
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 40 + w * scale << "\" height=\"" << 40 + h * scale
        << "\">\n";
    for (const auto& b : c.bigons) {
        out << "<polygon fill=\"#f5c04a\" fill-opacity=\"0.35\" stroke=\"none\" points=\"";
        for (const auto& v : b.polygon) out << px(v) << ' ';
        out << "\"/>\n";
    }
    auto polyline = [&](const std::vector<Vec2>& p, const char* colour) {
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& v : p) out << px(v) << ' ';
        out << "\"/>\n";
    };
    for (const auto& p : paths1) polyline(p, "#c0392b");
    for (const auto& p : paths2) polyline(p, "#2c6fbb");
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
        std::string xy = px(c.generators[i].point);
        auto comma = xy.find(',');
        out << "<circle r=\"3\" fill=\"black\" cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1)
            << "\"><title>" << i << "</title></circle>\n";
    }
    out << "</svg>\n";
}

} // namespace lagcorr
