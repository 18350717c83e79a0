#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace oracle {

using lagcorr::IntersectionPoint;

namespace {

Q crs(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

Q floorq(const Q& q)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Q(f);
}

Q ceilq(const Q& q) { return -floorq(-q); }

// lattice coordinates of v for basis (b1, b2)
std::array<Q, 2> coords(const Vec2& b1, const Vec2& b2, const Vec2& v)
{
    Q d = crs(b1, b2);
    return {crs(v, b2) / d, crs(b1, v) / d};
}

Vec2 reduce_basis(const Vec2& b1, const Vec2& b2, const Vec2& p)
{
    auto c = coords(b1, b2, p);
    Q k1 = floorq(c[0]), k2 = floorq(c[1]);
    return {p.x - k1 * b1.x - k2 * b2.x, p.y - k1 * b1.y - k2 * b2.y};
}

struct Hit {
    bool hit = false;
    Q s, u;
};

// half-open segments [p0, p1) and [q0, q1)
Hit half_open_hit(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1)
{
    Vec2 r = p1 - p0, t = q1 - q0, w = q0 - p0;
    Q d = crs(r, t);
    Hit h;
    if (sgn(d) == 0) {
        if (sgn(crs(w, r)) != 0) return h;
        Q rr = r.x * r.x + r.y * r.y;
        Q a = (w.x * r.x + w.y * r.y) / rr, b = ((q1 - p0).x * r.x + (q1 - p0).y * r.y) / rr;
        if (std::max(a, b) > 0 && std::min(a, b) < 1) throw std::runtime_error("collinear overlap");
        return h;
    }
    h.s = crs(w, t) / d;
    h.u = crs(w, r) / d;
    h.hit = sgn(h.s) >= 0 && h.s < 1 && sgn(h.u) >= 0 && h.u < 1;
    return h;
}

// closed segments touch anywhere
bool closed_touch(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1)
{
    auto o = [](const Vec2& a, const Vec2& b, const Vec2& c) { return sgn(crs(b - a, c - a)); };
    auto on = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
               c.y <= std::max(a.y, b.y);
    };
    int d1 = o(q0, q1, p0), d2 = o(q0, q1, p1), d3 = o(p0, p1, q0), d4 = o(p0, p1, q1);
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on(q0, q1, p0)) return true;
    if (d2 == 0 && on(q0, q1, p1)) return true;
    if (d3 == 0 && on(p0, p1, q0)) return true;
    if (d4 == 0 && on(p0, p1, q1)) return true;
    return false;
}

struct Box {
    Q x0, x1, y0, y1;
};

Box box_of(const std::vector<Vec2>& pts)
{
    Box b{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
    for (const auto& p : pts) {
        b.x0 = std::min(b.x0, p.x);
        b.x1 = std::max(b.x1, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

bool boxes_meet(const Box& a, const Box& b)
{
    return !(a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0);
}

// deck vectors lambda of the surface with (box b) + lambda meeting box a
std::vector<Vec2> translates(const FlatSurface& s, const Box& a, const Box& b)
{
    Q dx0 = a.x0 - b.x1, dx1 = a.x1 - b.x0, dy0 = a.y0 - b.y1, dy1 = a.y1 - b.y0;
    std::vector<Vec2> out;
    if (!s.is_torus()) {
        Q c = s.circumference;
        for (Q k = floorq(dx0 / c) - 1; k <= ceilq(dx1 / c) + 1; k += 1) out.push_back({k * c, Q(0)});
        return out;
    }
    Q lo1, hi1, lo2, hi2;
    bool first = true;
    for (const Vec2& v : {Vec2{dx0, dy0}, Vec2{dx0, dy1}, Vec2{dx1, dy0}, Vec2{dx1, dy1}}) {
        auto c = coords(s.b1, s.b2, v);
        if (first) {
            lo1 = hi1 = c[0];
            lo2 = hi2 = c[1];
            first = false;
        }
        lo1 = std::min(lo1, c[0]);
        hi1 = std::max(hi1, c[0]);
        lo2 = std::min(lo2, c[1]);
        hi2 = std::max(hi2, c[1]);
    }
    for (Q i = floorq(lo1) - 1; i <= ceilq(hi1) + 1; i += 1)
        for (Q j = floorq(lo2) - 1; j <= ceilq(hi2) + 1; j += 1)
            out.push_back({i * s.b1.x + j * s.b2.x, i * s.b1.y + j * s.b2.y});
    return out;
}

std::vector<Vec2> closed_path(const PLCurve& c)
{
    std::vector<Vec2> p = c.vertices;
    p.push_back(c.vertices[0] + c.holonomy);
    return p;
}

} // namespace

Vec2 reduce(const FlatSurface& s, const Vec2& p)
{
    if (s.is_torus()) return reduce_basis(s.b1, s.b2, p);
    Q k = floorq(p.x / s.circumference);
    return {p.x - k * s.circumference, p.y};
}

bool Crossing::operator<(const Crossing& o) const
{
    return std::tie(curve1, curve2, reduced) < std::tie(o.curve1, o.curve2, o.reduced);
}

bool Crossing::operator==(const Crossing& o) const
{
    return curve1 == o.curve1 && curve2 == o.curve2 && reduced == o.reduced;
}

std::vector<Crossing> brute_intersections(const MultiCurve& a, const MultiCurve& b)
{
    std::vector<Crossing> out;
    for (std::size_t ia = 0; ia < a.components.size(); ++ia)
        for (std::size_t ib = 0; ib < b.components.size(); ++ib) {
            const PLCurve& A = a.components[ia];
            const PLCurve& B = b.components[ib];
            auto pa = closed_path(A), pb = closed_path(B);
            for (std::size_t i = 0; i + 1 < pa.size(); ++i)
                for (std::size_t j = 0; j + 1 < pb.size(); ++j)
                    for (const Vec2& l : translates(A.surface, box_of({pa[i], pa[i + 1]}), box_of({pb[j], pb[j + 1]}))) {
                        Hit h = half_open_hit(pa[i], pa[i + 1], pb[j] + l, pb[j + 1] + l);
                        if (!h.hit) continue;
                        Vec2 x = pa[i] + (pa[i + 1] - pa[i]) * h.s;
                        out.push_back({static_cast<int>(ia), static_cast<int>(ib), reduce(A.surface, x)});
                    }
        }
    std::sort(out.begin(), out.end());
    return out;
}

bool Lune::operator<(const Lune& o) const
{
    return std::tie(curve1, curve2, from, to, area) < std::tie(o.curve1, o.curve2, o.from, o.to, o.area);
}

bool Lune::operator==(const Lune& o) const
{
    return curve1 == o.curve1 && curve2 == o.curve2 && from == o.from && to == o.to && area == o.area;
}

namespace {

Q shoelace(const std::vector<Vec2>& p)
{
    Q a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) a += crs(p[i], p[(i + 1) % p.size()]);
    return a / 2;
}

bool simple_polygon(const std::vector<Vec2>& p)
{
    std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 &a0 = p[i], &a1 = p[(i + 1) % n];
        if (a0 == a1) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 &b0 = p[j], &b1 = p[(j + 1) % n];
            bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                Vec2 da = a1 - a0, db = b1 - b0;
                if (sgn(crs(da, db)) == 0 && sgn(da.x * db.x + da.y * db.y) < 0) return false;
                continue;
            }
            if (closed_touch(a0, a1, b0, b1)) return false;
        }
    }
    return true;
}

// a lift unrolled over periods -k..k, as a vertex path
std::vector<Vec2> unrolled(const PLCurve& c, int k)
{
    std::vector<Vec2> out;
    for (int j = -k; j <= k; ++j)
        for (const auto& v : c.vertices) out.push_back(v + c.holonomy * Q(j));
    out.push_back(c.vertices[0] + c.holonomy * Q(k + 1));
    return out;
}

struct PathHit {
    Q alpha, beta;  // unrolled parameters
    Vec2 x;
};

// vertices strictly between parameters a and b, in order from a to b
void interior(const std::vector<Vec2>& path, const Q& a, const Q& b, std::vector<Vec2>& out)
{
    if (a < b) {
        for (Q m = floorq(a) + 1; m < b; m += 1) out.push_back(path[m.get_num().get_ui()]);
    }
    else {
        for (Q m = ceilq(a) - 1; m > b; m -= 1) out.push_back(path[m.get_num().get_ui()]);
    }
}

} // namespace

std::vector<Lune> brute_lunes(const MultiCurve& c1, const MultiCurve& c2, const std::vector<IntersectionPoint>& gens,
                              int periods)
{
    // corners are matched by edge and parameter, since a component that
    // runs over its image twice has two generators at one point
    using Label = std::tuple<int, int, int, Q, int, Q>;
    std::map<Label, int> index;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        const auto& x = gens[g];
        index[{x.curve1, x.curve2, x.edge1, x.s1, x.edge2, x.s2}] = static_cast<int>(g);
    }
    std::set<std::pair<std::vector<Vec2>, std::array<int, 2>>> seen;
    std::vector<Lune> out;
    for (std::size_t ia = 0; ia < c1.components.size(); ++ia)
        for (std::size_t ib = 0; ib < c2.components.size(); ++ib) {
            const PLCurve& A = c1.components[ia];
            const PLCurve& B = c2.components[ib];
            if (A.holonomy.is_zero() || B.holonomy.is_zero())
                throw std::runtime_error("lune oracle needs non-contractible components");
            const FlatSurface& S = A.surface;
            auto pa = unrolled(A, periods), pb = unrolled(B, periods);
            long nb = static_cast<long>(B.size());
            std::size_t na = A.size(), base0 = na * static_cast<std::size_t>(periods);
            std::vector<Vec2> base(pa.begin() + static_cast<long>(base0), pa.begin() + static_cast<long>(base0 + na + 1));
            std::vector<Box> sa;
            for (std::size_t i = 0; i + 1 < pa.size(); ++i) sa.push_back(box_of({pa[i], pa[i + 1]}));
            Box all_a = box_of(pa);
            for (const Vec2& l : translates(S, box_of(base), box_of(pb))) {
                std::vector<Vec2> qb;
                for (const auto& v : pb) qb.push_back(v + l);
                if (!boxes_meet(all_a, box_of(qb))) continue;
                std::vector<PathHit> hits;
                for (std::size_t i = 0; i + 1 < pa.size(); ++i)
                    for (std::size_t j = 0; j + 1 < qb.size(); ++j) {
                        if (!boxes_meet(sa[i], box_of({qb[j], qb[j + 1]}))) continue;
                        Hit h = half_open_hit(pa[i], pa[i + 1], qb[j], qb[j + 1]);
                        if (h.hit)
                            hits.push_back({Q(static_cast<long>(i)) + h.s, Q(static_cast<long>(j)) + h.u,
                                            pa[i] + (pa[i + 1] - pa[i]) * h.s});
                    }
                for (const auto& p : hits) {
                    if (p.alpha < Q(static_cast<long>(base0)) || p.alpha >= Q(static_cast<long>(base0 + na))) continue;
                    for (const auto& q : hits) {
                        if (q.alpha == p.alpha || q.beta == p.beta) continue;
                        std::vector<Vec2> poly{p.x};
                        interior(pa, p.alpha, q.alpha, poly);
                        std::size_t iq = poly.size();
                        poly.push_back(q.x);
                        interior(qb, q.beta, p.beta, poly);
                        Q area = shoelace(poly);
                        if (sgn(area) == 0) continue;
                        int sg = sgn(area);
                        std::size_t n = poly.size();
                        auto turn = [&](std::size_t k) {
                            const Vec2& prev = poly[(k + n - 1) % n];
                            const Vec2& next = poly[(k + 1) % n];
                            return sgn(crs(poly[k] - prev, next - poly[k])) * sg;
                        };
                        if (turn(0) <= 0 || turn(iq) <= 0) continue;
                        if (!simple_polygon(poly)) continue;
                        // with the disc on the left the boundary passes from
                        // the c1 arc to the c2 arc at q when the polygon is
                        // counterclockwise, at p otherwise
                        const PathHit& plus = sg > 0 ? q : p;
                        const PathHit& minus = sg > 0 ? p : q;
                        std::vector<Vec2> ccw = poly;
                        if (sg < 0) std::reverse(ccw.begin(), ccw.end());
                        auto start = std::find(ccw.begin(), ccw.end(), plus.x);
                        std::rotate(ccw.begin(), start, ccw.end());
                        Vec2 shift = reduce(S, plus.x) - plus.x;
                        for (auto& v : ccw) v = v + shift;
                        Lune lu;
                        lu.curve1 = static_cast<int>(ia);
                        lu.curve2 = static_cast<int>(ib);
                        lu.area = abs(area);
                        auto label = [&](const PathHit& h) -> Label {
                            Q fa = floorq(h.alpha), fb = floorq(h.beta);
                            long ea = fa.get_num().get_si() % static_cast<long>(na);
                            long eb = fb.get_num().get_si() % nb;
                            return {lu.curve1, lu.curve2, static_cast<int>(ea), h.alpha - fa, static_cast<int>(eb),
                                    h.beta - fb};
                        };
                        auto f = index.find(label(plus));
                        auto t = index.find(label(minus));
                        lu.from = f == index.end() ? -1 : f->second;
                        lu.to = t == index.end() ? -1 : t->second;
                        if (!seen.insert({ccw, {lu.from, lu.to}}).second) continue;
                        out.push_back(lu);
                    }
                }
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Lune> lunes_of(const std::vector<lagcorr::Bigon>& bigons)
{
    std::vector<Lune> out;
    for (const auto& b : bigons) out.push_back({b.from, b.to, b.curve1, b.curve2, abs(shoelace(b.polygon))});
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t brute_triples(const lagcorr::Correspondence& corr, const PLCurve& l1, const PLCurve& l2)
{
    const FlatSurface& F = corr.domain;
    const FlatSurface& F1 = corr.leg1.target();
    const FlatSurface& F2 = corr.leg2.target();
    // coset representatives of Lambda_1 / Lambda_F
    Q index = abs(crs(F.b1, F.b2) / crs(F1.b1, F1.b2));
    std::set<Vec2> reps;
    for (long r = 0; Q(static_cast<long>(reps.size())) < index; ++r)
        for (long i = -r; i <= r; ++i)
            for (long j = -r; j <= r; ++j)
                reps.insert(reduce_basis(F.b1, F.b2, F1.b1 * Q(i) + F1.b2 * Q(j)));
    auto p1 = closed_path(l1), p2 = closed_path(l2);
    std::size_t count = 0;
    for (const Vec2& mu : reps)
        for (std::size_t i = 0; i + 1 < p1.size(); ++i) {
            Vec2 a0 = p1[i] + mu, a1 = p1[i + 1] + mu;
            for (std::size_t j = 0; j + 1 < p2.size(); ++j)
                for (const Vec2& l : translates(F2, box_of({a0, a1}), box_of({p2[j], p2[j + 1]})))
                    if (half_open_hit(a0, a1, p2[j] + l, p2[j + 1] + l).hit) ++count;
        }
    return count;
}

double pullback_fd(const lagcorr::jet::SmoothMap2to4& m, double x1, double x2, double h)
{
    std::array<std::array<double, 2>, 4> J{};
    for (int a = 0; a < 2; ++a) {
        double xp[2] = {x1, x2}, xm[2] = {x1, x2};
        xp[a] += h;
        xm[a] -= h;
        for (int i = 0; i < 4; ++i)
            J[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] =
                (lagcorr::expr::evaluate(m.g[static_cast<std::size_t>(i)], xp, m.params) -
                 lagcorr::expr::evaluate(m.g[static_cast<std::size_t>(i)], xm, m.params)) /
                (2 * h);
    }
    double w1 = J[0][0] * J[1][1] - J[1][0] * J[0][1];
    double w2 = J[2][0] * J[3][1] - J[3][0] * J[2][1];
    return w1 - w2;
}

std::string random_expression(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth)
{
    std::uniform_int_distribution<int> pick(0, 11);
    auto leaf = [&]() -> std::string {
        std::uniform_int_distribution<int> v(0, static_cast<int>(vars.size()) + 1);
        int k = v(rng);
        if (k < static_cast<int>(vars.size())) return vars[static_cast<std::size_t>(k)];
        std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
        return "(" + std::to_string(num(rng)) + "/" + std::to_string(den(rng)) + ")";
    };
    if (depth <= 0) return leaf();
    auto sub = [&] { return random_expression(rng, vars, depth - 1); };
    switch (pick(rng)) {
    case 0: return leaf();
    case 1: return "(" + sub() + " + " + sub() + ")";
    case 2: return "(" + sub() + " - " + sub() + ")";
    case 3: return "(" + sub() + ")*(" + sub() + ")";
    case 4: return "(" + sub() + ")/(2 + (" + sub() + ")^2)";
    case 5: return "(" + sub() + ")^" + std::to_string(2 + static_cast<int>(rng() % 2));
    case 6: return "sin(" + sub() + ")";
    case 7: return "cos(" + sub() + ")";
    case 8: return "exp(sin(" + sub() + "))";
    case 9: return "sqrt(1 + (" + sub() + ")^2)";
    case 10: return "bump(" + sub() + ")";
    default: return "-(" + sub() + ")";
    }
}

std::string fuzz_input(std::mt19937_64& rng)
{
    static const std::vector<std::string> tokens = {
        "x1", "x2", "x3", "r", "sin", "cos", "exp", "sqrt", "bump", "pi", "(", ")", "+", "-", "*", "/", "^",
        "2", "1/2", "0.25", "3.", ".5", "1e3", ",", " ", "@", "x", "sinx", "((", "^-", "9999999999999999999999"};
    std::uniform_int_distribution<int> mode(0, 3);
    std::string s;
    switch (mode(rng)) {
    case 0: {
        int n = static_cast<int>(rng() % 24);
        for (int i = 0; i < n; ++i) s += tokens[rng() % tokens.size()];
        break;
    }
    case 1: {
        int n = static_cast<int>(rng() % 32);
        for (int i = 0; i < n; ++i) s += static_cast<char>(rng() % 256);
        break;
    }
    case 2: {
        s = random_expression(rng, {"x1", "x2", "x3"}, 3);
        int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits && !s.empty(); ++e) {
            std::size_t at = rng() % s.size();
            if (rng() % 2) s.erase(at, 1);
            else s.insert(at, 1, "()+-*/^,x1"[rng() % 10]);
        }
        break;
    }
    default: {
        int n = static_cast<int>(rng() % 400);
        s = std::string(static_cast<std::size_t>(n), '(') + "x1" + std::string(static_cast<std::size_t>(rng() % 400), ')');
        break;
    }
    }
    return s;
}

} // namespace oracle
