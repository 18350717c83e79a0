#include "lagcorr/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "lagcorr/error.hpp"

namespace lagcorr {

Box Box::of(const std::vector<Vec2>& pts)
{
    Box b{pts.at(0).x, pts.at(0).x, pts.at(0).y, pts.at(0).y};
    for (const auto& p : pts) {
        if (p.x < b.x0) b.x0 = p.x;
        if (p.x > b.x1) b.x1 = p.x;
        if (p.y < b.y0) b.y0 = p.y;
        if (p.y > b.y1) b.y1 = p.y;
    }
    return b;
}

Box Box::of(const Vec2& a, const Vec2& b)
{
    return {a.x < b.x ? a.x : b.x, a.x < b.x ? b.x : a.x, a.y < b.y ? a.y : b.y, a.y < b.y ? b.y : a.y};
}

Box Box::unite(const Box& o) const
{
    return {x0 < o.x0 ? x0 : o.x0, x1 > o.x1 ? x1 : o.x1, y0 < o.y0 ? y0 : o.y0, y1 > o.y1 ? y1 : o.y1};
}

SegIntersection intersect_segments(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1)
{
    SegIntersection r;
    if (!Box::of(p0, p1).overlaps(Box::of(q0, q1))) return r;
    Vec2 d1 = p1 - p0;
    Vec2 d2 = q1 - q0;
    Vec2 w = q0 - p0;
    Q den = cross(d1, d2);
    if (sgn(den) == 0) {
        if (sgn(cross(w, d1)) != 0) return r;
        // collinear: compare projections on d1
        Q l = dot(d1, d1);
        Q a = dot(q0 - p0, d1) / l;
        Q b = dot(q1 - p0, d1) / l;
        if (a > b) std::swap(a, b);
        if (b < 0 || a > 1) return r;
        r.kind = SegHit::Overlap;
        r.s = sgn(a) > 0 ? a : Q(0);
        r.u = b < 1 ? b : Q(1);
        return r;
    }
    Q s = cross(w, d2) / den;
    Q u = cross(w, d1) / den;
    if (sgn(s) < 0 || s > 1 || sgn(u) < 0 || u > 1) return r;
    r.kind = SegHit::Cross;
    r.s = s;
    r.u = u;
    return r;
}

Q parse_rational(const std::string& s)
{
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = s.size();
    while (j > i && std::isspace(static_cast<unsigned char>(s[j - 1]))) --j;
    std::string t = s.substr(i, j - i);
    if (t.empty()) throw Error("Parse", "empty rational");
    auto valid_int = [](const std::string& x) {
        std::size_t k = (!x.empty() && (x[0] == '-' || x[0] == '+')) ? 1 : 0;
        if (k >= x.size()) return false;
        for (; k < x.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(x[k]))) return false;
        return true;
    };
    auto strip_plus = [](std::string x) { return (!x.empty() && x[0] == '+') ? x.substr(1) : x; };
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        std::string a = t.substr(0, slash), b = t.substr(slash + 1);
        if (!valid_int(a) || !valid_int(b)) throw Error("Parse", "malformed rational '" + s + "'");
        mpz_class den(strip_plus(b));
        if (den == 0) throw Error("Parse", "zero denominator in '" + s + "'");
        Q q(mpz_class(strip_plus(a)), den);
        q.canonicalize();
        return q;
    }
    auto dotp = t.find('.');
    if (dotp != std::string::npos) {
        std::string a = t.substr(0, dotp), b = t.substr(dotp + 1);
        bool neg = !a.empty() && a[0] == '-';
        if (!a.empty() && (a[0] == '-' || a[0] == '+')) a = a.substr(1);
        if (a.empty()) a = "0";
        if (b.empty() || !valid_int(a) || !valid_int(b) || b[0] == '-' || b[0] == '+')
            throw Error("Parse", "malformed decimal '" + s + "'");
        mpz_class den = 1;
        for (std::size_t k = 0; k < b.size(); ++k) den *= 10;
        Q q(mpz_class(a) * den + mpz_class(b), den);
        q.canonicalize();
        return neg ? Q(-q) : q;
    }
    if (!valid_int(t)) throw Error("Parse", "malformed rational '" + s + "'");
    return Q(mpz_class(strip_plus(t)));
}

std::string to_string(const Q& q) { return q.get_str(); }

Q floor_q(const Q& q)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Q(f);
}

Q ceil_q(const Q& q)
{
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Q(c);
}

bool exact_sqrt(const Q& s, Q& root)
{
    if (sgn(s) < 0) return false;
    if (!mpz_perfect_square_p(s.get_num_mpz_t()) || !mpz_perfect_square_p(s.get_den_mpz_t())) return false;
    mpz_class a, b;
    mpz_sqrt(a.get_mpz_t(), s.get_num_mpz_t());
    mpz_sqrt(b.get_mpz_t(), s.get_den_mpz_t());
    root = Q(a, b);
    root.canonicalize();
    return true;
}

Q sqrt_approx(const Q& s, const Q& tol)
{
    if (sgn(s) < 0) throw Error("EvaluationDomain", "sqrt of negative rational");
    Q root;
    if (exact_sqrt(s, root)) return root;
    // floor(sqrt(p q 4^k)) / (q 2^k) is within 1/(q 2^k) of sqrt(p/q)
    mpz_class p = s.get_num(), q = s.get_den();
    unsigned k = 0;
    while (Q(1, q * (mpz_class(1) << k)) > tol) ++k;
    mpz_class n = p * q * (mpz_class(1) << (2 * k));
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    Q out(r, q * (mpz_class(1) << k));
    out.canonicalize();
    return out;
}

Q sqrt_dyadic(const Q& s, unsigned k)
{
    if (sgn(s) < 0) throw Error("EvaluationDomain", "sqrt of negative rational");
    Q root;
    if (exact_sqrt(s, root)) return root;
    mpz_class scaled = (s.get_num() << (2 * k)) / s.get_den();
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), scaled.get_mpz_t());
    Q out(r, mpz_class(1) << k);
    out.canonicalize();
    return out;
}

Q rationalize(double x, long max_den)
{
    if (!std::isfinite(x)) throw Error("EvaluationDomain", "cannot rationalize a non-finite value");
    // convergents h/k of the continued fraction of x
    mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        mpz_class ai(a);
        mpz_class h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        double frac = r - a;
        if (frac < 1e-15) break;
        Q cur(h1, k1);
        if (std::abs(cur.get_d() - x) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        r = 1 / frac;
    }
    Q out(h1, k1);
    out.canonicalize();
    return out;
}

} // namespace lagcorr
