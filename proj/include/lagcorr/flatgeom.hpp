#ifndef LAGCORR_FLATGEOM_HPP
#define LAGCORR_FLATGEOM_HPP

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "lagcorr/error.hpp"
#include "lagcorr/rational.hpp"

namespace lagcorr {

enum class SurfaceKind { Torus, Cylinder };

// A flat torus R^2/Lambda (Lambda spanned by the columns b1, b2) or a flat
// cylinder (R/cZ) x [h0,h1]. Points are always given in plane coordinates.
struct FlatSurface {
    SurfaceKind kind = SurfaceKind::Torus;
    Vec2 b1, b2;
    Q circumference, h0, h1;

    bool is_torus() const { return kind == SurfaceKind::Torus; }
    Q det() const { return cross(b1, b2); }

    // rank of the deck group of the universal cover (plane or strip)
    int deck_rank() const { return is_torus() ? 2 : 1; }
    Vec2 deck_generator(int i) const;

    // coordinates with respect to the deck generators; the second entry is
    // the height for cylinders
    std::array<Q, 2> lattice_coords(const Vec2& v) const;
    Vec2 from_lattice(const Q& k1, const Q& k2) const;
    bool in_lattice(const Vec2& v) const;

    // representative in the half-open fundamental domain
    Vec2 reduce(const Vec2& p) const;

    // deck translations lambda such that box + lambda meets target
    std::vector<Vec2> deck_in_window(const Box& box, const Box& target) const;

    bool contains_height(const Q& t) const { return is_torus() || (h0 <= t && t <= h1); }
    bool operator==(const FlatSurface& o) const;
};

FlatSurface make_torus(const Vec2& b1, const Vec2& b2);
FlatSurface make_cylinder(const Q& circumference, const Q& h0, const Q& h1);

// R^2/Lambda' -> R^2/Lambda, identity on the plane, with B' = B M.
struct CoveringMap {
    FlatSurface source, target;
    std::array<std::array<mpz_class, 2>, 2> M;
    long degree = 1;
    std::vector<Vec2> deck;  // coset representatives of Lambda' in Lambda, plane coordinates

    Vec2 deck_rep(const Vec2& lambda) const;  // canonical coset representative of a target lattice vector
};

CoveringMap covering_from_sublattice(const FlatSurface& source, const FlatSurface& target);
CoveringMap compose(const CoveringMap& inner, const CoveringMap& outer);

// Piecewise linear twist profile m on [-1,1], constant beyond the ends.
struct TwistProfile {
    std::vector<Q> t, m;
    int n = 0;           // number of Dehn twists; 0 is the good map
    bool good = false;

    Q operator()(const Q& s) const;
    Q slope_at(const Q& s) const;  // right derivative
    double eval(double s) const;
    double slope(double s) const;  // derivative, one-sided at breakpoints
};

TwistProfile make_profile(std::vector<std::pair<Q, Q>> points, int n, bool good);
TwistProfile dehn_twist_profile(int n);
TwistProfile good_map_profile();

struct SelfIdentity {};
struct SelfTwist {
    TwistProfile profile;
    int direction = 1;  // -1 applies the inverse twist
};
struct SelfTranslation { Vec2 v; };
using SurfaceSelfMap = std::variant<SelfIdentity, SelfTwist, SelfTranslation>;

// Plane coordinates of the image; the twist shifts theta by m(t) * c / 2,
// i.e. by pi * m(t) when the circumference is read as 2 pi.
Vec2 apply_self_map(const SurfaceSelfMap& f, const FlatSurface& surface, const Vec2& p);

// (theta, t) -> (theta, t^2) from the cylinder of heights [-1,1] into the
// cylinder of the same circumference and heights [-1,1]; the image is the
// upper half 0 <= s <= 1 and the fold circle t = 0 maps to s = 0.
struct FoldMap {
    FlatSurface source, target;
};

FoldMap make_fold(const Q& circumference);

// t = a + b * sqrt(radicand), exact
struct FoldPoint {
    Q theta;
    Q a, b, radicand;

    bool exact() const { return sgn(b) == 0; }
    double height() const;
};

Vec2 fold_image(const FoldMap& f, const Vec2& p);
std::vector<FoldPoint> fold_preimages(const FoldMap& f, const Vec2& q);

} // namespace lagcorr

#endif
