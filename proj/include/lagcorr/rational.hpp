#ifndef LAGCORR_RATIONAL_HPP
#define LAGCORR_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <vector>

namespace lagcorr {

using Q = mpq_class;

struct Vec2 {
    Q x, y;

    Vec2() = default;
    Vec2(Q x_, Q y_) : x(std::move(x_)), y(std::move(y_)) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(const Q& k) const { return {x * k, y * k}; }
    Vec2& operator+=(const Vec2& o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Vec2& o) const { return !(*this == o); }
    bool operator<(const Vec2& o) const { return x < o.x || (x == o.x && y < o.y); }
    bool is_zero() const { return sgn(x) == 0 && sgn(y) == 0; }
};

inline Q cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Q dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// sign of the turn a -> b -> c
inline int orient(const Vec2& a, const Vec2& b, const Vec2& c) { return sgn(cross(b - a, c - a)); }

struct Box {
    Q x0, x1, y0, y1;

    static Box of(const std::vector<Vec2>& pts);
    static Box of(const Vec2& a, const Vec2& b);
    bool overlaps(const Box& o) const { return !(x1 < o.x0 || o.x1 < x0 || y1 < o.y0 || o.y1 < y0); }
    bool contains(const Vec2& p) const { return x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1; }
    Box unite(const Box& o) const;
    Box grow(const Q& r) const { return {x0 - r, x1 + r, y0 - r, y1 + r}; }
    Box shift(const Vec2& v) const { return {x0 + v.x, x1 + v.x, y0 + v.y, y1 + v.y}; }
};

enum class SegHit { None, Cross, Overlap };

struct SegIntersection {
    SegHit kind = SegHit::None;
    // Cross: parameters along the first and second segment.
    // Overlap: parameter interval [s,u] of the shared part on the first segment.
    Q s, u;
};

// Exact test of closed segments p0p1 and q0q1.
SegIntersection intersect_segments(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1);

// Parses "p/q", "p", or a decimal string; throws Error("Parse").
Q parse_rational(const std::string& s);
std::string to_string(const Q& q);

Q floor_q(const Q& q);
Q ceil_q(const Q& q);

// Rational r with |r - sqrt(s)| <= tol and r >= 0; exact when s is a square.
Q sqrt_approx(const Q& s, const Q& tol);
bool exact_sqrt(const Q& s, Q& root);
// floor(sqrt(s) * 2^k) / 2^k, exact when that is sqrt(s)
Q sqrt_dyadic(const Q& s, unsigned k);

// Continued-fraction convergent of x with denominator at most max_den.
Q rationalize(double x, long max_den = 1000000);

} // namespace lagcorr

#endif
