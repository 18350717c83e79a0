#include "lagcorr/flatgeom.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lagcorr {

Vec2 FlatSurface::deck_generator(int i) const
{
    if (is_torus()) return i == 0 ? b1 : b2;
    return {circumference, Q(0)};
}

std::array<Q, 2> FlatSurface::lattice_coords(const Vec2& v) const
{
    if (!is_torus()) return {v.x / circumference, v.y};
    Q d = det();
    return {cross(v, b2) / d, cross(b1, v) / d};
}

Vec2 FlatSurface::from_lattice(const Q& k1, const Q& k2) const
{
    if (!is_torus()) return {k1 * circumference, k2};
    return b1 * k1 + b2 * k2;
}

bool FlatSurface::in_lattice(const Vec2& v) const
{
    auto k = lattice_coords(v);
    if (!is_torus()) return k[0].get_den() == 1 && sgn(v.y) == 0;
    return k[0].get_den() == 1 && k[1].get_den() == 1;
}

Vec2 FlatSurface::reduce(const Vec2& p) const
{
    auto k = lattice_coords(p);
    if (!is_torus()) return {p.x - floor_q(k[0]) * circumference, p.y};
    return p - from_lattice(floor_q(k[0]), floor_q(k[1]));
}

std::vector<Vec2> FlatSurface::deck_in_window(const Box& box, const Box& target) const
{
    // translations lambda with (box + lambda) meeting target lie in diff
    Box diff{target.x0 - box.x1, target.x1 - box.x0, target.y0 - box.y1, target.y1 - box.y0};
    std::vector<Vec2> out;
    if (!is_torus()) {
        if (sgn(diff.y0) > 0 || sgn(diff.y1) < 0) return out;
        mpz_class lo = floor_q(diff.x0 / circumference).get_num();
        mpz_class hi = ceil_q(diff.x1 / circumference).get_num();
        for (mpz_class k = lo; k <= hi; ++k) {
            Vec2 l{Q(k) * circumference, Q(0)};
            if (box.shift(l).overlaps(target)) out.push_back(l);
        }
        return out;
    }
    std::array<Vec2, 4> corners{Vec2{diff.x0, diff.y0}, Vec2{diff.x1, diff.y0}, Vec2{diff.x0, diff.y1},
                                Vec2{diff.x1, diff.y1}};
    Q k0lo, k0hi, k1lo, k1hi;
    for (int i = 0; i < 4; ++i) {
        auto k = lattice_coords(corners[static_cast<std::size_t>(i)]);
        if (i == 0 || k[0] < k0lo) k0lo = k[0];
        if (i == 0 || k[0] > k0hi) k0hi = k[0];
        if (i == 0 || k[1] < k1lo) k1lo = k[1];
        if (i == 0 || k[1] > k1hi) k1hi = k[1];
    }
    mpz_class a0 = floor_q(k0lo).get_num(), a1 = ceil_q(k0hi).get_num();
    mpz_class c0 = floor_q(k1lo).get_num(), c1 = ceil_q(k1hi).get_num();
    for (mpz_class i = a0; i <= a1; ++i)
        for (mpz_class j = c0; j <= c1; ++j) {
            Vec2 l = from_lattice(Q(i), Q(j));
            if (box.shift(l).overlaps(target)) out.push_back(l);
        }
    return out;
}

bool FlatSurface::operator==(const FlatSurface& o) const
{
    if (kind != o.kind) return false;
    if (!is_torus()) return circumference == o.circumference && h0 == o.h0 && h1 == o.h1;
    // same lattice, possibly another basis
    auto k1 = lattice_coords(o.b1), k2 = lattice_coords(o.b2);
    for (const auto& q : {k1[0], k1[1], k2[0], k2[1]})
        if (q.get_den() != 1) return false;
    Q d = k1[0] * k2[1] - k1[1] * k2[0];
    return d == 1 || d == -1;
}

FlatSurface make_torus(const Vec2& b1, const Vec2& b2)
{
    if (sgn(cross(b1, b2)) == 0) throw Error("DegenerateLattice", "lattice basis vectors are linearly dependent");
    FlatSurface s;
    s.kind = SurfaceKind::Torus;
    s.b1 = b1;
    s.b2 = b2;
    return s;
}

FlatSurface make_cylinder(const Q& circumference, const Q& h0, const Q& h1)
{
    if (sgn(circumference) <= 0) throw Error("DegenerateLattice", "cylinder circumference must be positive");
    if (!(h0 < h1)) throw Error("DegenerateLattice", "cylinder height interval is empty");
    FlatSurface s;
    s.kind = SurfaceKind::Cylinder;
    s.circumference = circumference;
    s.h0 = h0;
    s.h1 = h1;
    return s;
}

namespace {

// canonical representative of k modulo M Z^2: k - M floor(M^{-1} k)
std::array<mpz_class, 2> coset_rep(const std::array<std::array<mpz_class, 2>, 2>& M, const std::array<mpz_class, 2>& k)
{
    mpz_class d = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    Q u(M[1][1] * k[0] - M[0][1] * k[1], d);
    Q v(-M[1][0] * k[0] + M[0][0] * k[1], d);
    u.canonicalize();
    v.canonicalize();
    mpz_class fu = floor_q(u).get_num(), fv = floor_q(v).get_num();
    return {k[0] - (M[0][0] * fu + M[0][1] * fv), k[1] - (M[1][0] * fu + M[1][1] * fv)};
}

} // namespace

Vec2 CoveringMap::deck_rep(const Vec2& lambda) const
{
    auto k = target.lattice_coords(lambda);
    if (k[0].get_den() != 1 || k[1].get_den() != 1) throw Error("NotALatticeVector", "deck_rep needs a target lattice vector");
    auto r = coset_rep(M, {k[0].get_num(), k[1].get_num()});
    return target.from_lattice(Q(r[0]), Q(r[1]));
}

CoveringMap covering_from_sublattice(const FlatSurface& source, const FlatSurface& target)
{
    if (!source.is_torus() || !target.is_torus()) throw Error("WrongSurface", "coverings are defined between tori");
    auto c1 = target.lattice_coords(source.b1);
    auto c2 = target.lattice_coords(source.b2);
    for (const auto& q : {c1[0], c1[1], c2[0], c2[1]})
        if (q.get_den() != 1) throw Error("NotASublattice", "source lattice is not contained in the target lattice");
    CoveringMap cov;
    cov.source = source;
    cov.target = target;
    cov.M = {{{c1[0].get_num(), c2[0].get_num()}, {c1[1].get_num(), c2[1].get_num()}}};
    mpz_class d = cov.M[0][0] * cov.M[1][1] - cov.M[0][1] * cov.M[1][0];
    d = abs(d);
    if (!d.fits_slong_p() || d > 1000000) throw Error("NotASublattice", "covering degree too large");
    cov.degree = d.get_si();
    std::set<std::pair<mpz_class, mpz_class>> reps;
    for (long i = 0; i < cov.degree; ++i)
        for (long j = 0; j < cov.degree; ++j) {
            auto r = coset_rep(cov.M, {mpz_class(i), mpz_class(j)});
            reps.insert({r[0], r[1]});
        }
    for (const auto& r : reps) cov.deck.push_back(target.from_lattice(Q(r.first), Q(r.second)));
    std::sort(cov.deck.begin(), cov.deck.end());
    return cov;
}

CoveringMap compose(const CoveringMap& inner, const CoveringMap& outer)
{
    if (!(inner.target == outer.source)) throw Error("WrongSurface", "coverings are not composable");
    return covering_from_sublattice(inner.source, outer.target);
}

// ------------------------------------------------------------- profiles

Q TwistProfile::operator()(const Q& s) const
{
    if (s <= t.front()) return m.front();
    if (s >= t.back()) return m.back();
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (s <= t[i + 1]) return m[i] + (m[i + 1] - m[i]) * (s - t[i]) / (t[i + 1] - t[i]);
    return m.back();
}

Q TwistProfile::slope_at(const Q& s) const
{
    if (s < t.front() || s >= t.back()) return 0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (s < t[i + 1]) return (m[i + 1] - m[i]) / (t[i + 1] - t[i]);
    return 0;
}

double TwistProfile::eval(double s) const
{
    if (s <= t.front().get_d()) return m.front().get_d();
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        double a = t[i].get_d(), b = t[i + 1].get_d();
        if (s <= b) return m[i].get_d() + (m[i + 1].get_d() - m[i].get_d()) * (s - a) / (b - a);
    }
    return m.back().get_d();
}

double TwistProfile::slope(double s) const
{
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (s >= t[i].get_d() && s < t[i + 1].get_d())
            return (m[i + 1].get_d() - m[i].get_d()) / (t[i + 1].get_d() - t[i].get_d());
    return 0.0;
}

TwistProfile make_profile(std::vector<std::pair<Q, Q>> points, int n, bool good)
{
    if (points.size() < 2) throw Error("InvalidProfile", "at least two breakpoints required");
    if (!good && n < 1) throw Error("InvalidProfile", "Dehn twist count must be positive");
    TwistProfile p;
    p.n = good ? 0 : n;
    p.good = good;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && !(points[i - 1].first < points[i].first))
            throw Error("InvalidProfile", "breakpoints must be strictly increasing");
        p.t.push_back(points[i].first);
        p.m.push_back(points[i].second);
    }
    if (p.t.front() != -1 || p.t.back() != 1) throw Error("InvalidProfile", "profile must span [-1,1]");
    Q flat = good ? Q(3, 5) : Q(3, 4);
    Q ramp = good ? Q(2, 5) : Q(1, 4);
    Q top = good ? Q(1) : Q(2 * n);
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        if (sgn(p.m[i]) < 0 || p.m[i] > top) throw Error("InvalidProfile", "profile leaves its range");
        if (p.t[i] <= -flat && sgn(p.m[i]) != 0) throw Error("InvalidProfile", "profile must vanish near t = -1");
        if (p.t[i] >= flat && p.m[i] != top) throw Error("InvalidProfile", "profile must be constant near t = 1");
    }
    if (p(-flat) != 0 || p(flat) != top) throw Error("InvalidProfile", "profile plateaus violated");
    for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
        bool meets = p.t[i] < ramp && p.t[i + 1] > -ramp;
        if (meets && !(p.m[i] < p.m[i + 1])) throw Error("InvalidProfile", "profile must increase strictly on the ramp");
    }
    return p;
}

TwistProfile dehn_twist_profile(int n)
{
    return make_profile({{Q(-1), Q(0)}, {Q(-3, 4), Q(0)}, {Q(3, 4), Q(2 * n)}, {Q(1), Q(2 * n)}}, n, false);
}

TwistProfile good_map_profile()
{
    return make_profile({{Q(-1), Q(0)}, {Q(-3, 5), Q(0)}, {Q(3, 5), Q(1)}, {Q(1), Q(1)}}, 0, true);
}

Vec2 apply_self_map(const SurfaceSelfMap& f, const FlatSurface& surface, const Vec2& p)
{
    if (std::holds_alternative<SelfIdentity>(f)) return p;
    if (const auto* tr = std::get_if<SelfTranslation>(&f)) return p + tr->v;
    const auto& tw = std::get<SelfTwist>(f);
    if (surface.is_torus()) throw Error("WrongSurface", "twists act on cylinders");
    if (!surface.contains_height(p.y)) throw Error("WrongSurface", "point outside the cylinder");
    return {p.x + Q(tw.direction) * tw.profile(p.y) * surface.circumference / 2, p.y};
}

// ----------------------------------------------------------------- fold

FoldMap make_fold(const Q& circumference)
{
    return {make_cylinder(circumference, -1, 1), make_cylinder(circumference, -1, 1)};
}

double FoldPoint::height() const { return a.get_d() + b.get_d() * std::sqrt(radicand.get_d()); }

Vec2 fold_image(const FoldMap& f, const Vec2& p)
{
    if (!f.source.contains_height(p.y)) throw Error("OutOfRange", "point outside the fold source");
    return {p.x, p.y * p.y};
}

std::vector<FoldPoint> fold_preimages(const FoldMap& f, const Vec2& q)
{
    if (!f.target.contains_height(q.y)) throw Error("OutOfRange", "point outside the fold target");
    std::vector<FoldPoint> out;
    int s = sgn(q.y);
    if (s < 0) return out;
    if (s == 0) {
        out.push_back({q.x, Q(0), Q(0), Q(0)});
        return out;
    }
    Q r;
    if (exact_sqrt(q.y, r)) {
        out.push_back({q.x, r, Q(0), Q(0)});
        out.push_back({q.x, -r, Q(0), Q(0)});
    }
    else {
        out.push_back({q.x, Q(0), Q(1), q.y});
        out.push_back({q.x, Q(0), Q(-1), q.y});
    }
    return out;
}

} // namespace lagcorr
