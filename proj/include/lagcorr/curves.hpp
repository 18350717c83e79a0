#ifndef LAGCORR_CURVES_HPP
#define LAGCORR_CURVES_HPP

#include <vector>

#include "lagcorr/flatgeom.hpp"

namespace lagcorr {

// Closed PL curve: the projection of v0 -> ... -> v_{k-1} -> v0 + holonomy.
struct PLCurve {
    FlatSurface surface;
    std::vector<Vec2> vertices;
    Vec2 holonomy;

    std::size_t size() const { return vertices.size(); }
    // vertex with an arbitrary integer index along the periodic lift
    Vec2 vertex(long i) const;
    Vec2 edge_start(std::size_t i) const { return vertices[i]; }
    Vec2 edge_end(std::size_t i) const { return i + 1 < vertices.size() ? vertices[i + 1] : vertices[0] + holonomy; }
    Vec2 edge_dir(std::size_t i) const { return edge_end(i) - edge_start(i); }
    Vec2 point(std::size_t edge, const Q& s) const { return edge_start(edge) + edge_dir(edge) * s; }
    // box of v0 .. v_k (one period of the lift)
    Box box() const;
    Q length_estimate() const;
};

struct MultiCurve {
    std::vector<PLCurve> components;
};

PLCurve make_curve(const FlatSurface& surface, std::vector<Vec2> vertices, const Vec2& holonomy);

// One point of the fiber product: curve1 edge1 at s1 meets curve2 edge2 at
// s2 translated by deck, i.e. point = e1(s1) = e2(s2) + deck, with s1, s2 in
// [0,1). A parameter 0 only occurs at a vertex where the curve runs straight
// on; hits at corners are rejected as non-transverse.
struct IntersectionPoint {
    int curve1 = 0, curve2 = 0;
    int edge1 = 0, edge2 = 0;
    Q s1, s2;
    Vec2 point;
    Vec2 deck;
};

std::vector<IntersectionPoint> intersect(const MultiCurve& a, const MultiCurve& b);
std::vector<IntersectionPoint> intersect(const PLCurve& a, const PLCurve& b);

MultiCurve lift_to_cover(const PLCurve& c, const CoveringMap& cov);

std::vector<Vec2> map_path(const FlatSurface& surface, const std::vector<Vec2>& path, const SurfaceSelfMap& f);
PLCurve map_curve(const PLCurve& c, const SurfaceSelfMap& f);

// True iff one lift to the universal cover is embedded.
bool embedded_lift_check(const PLCurve& c);

// True iff no two edges of c overlap along a segment on the surface, i.e. c
// does not run over any part of its image twice.
bool traverses_once(const PLCurve& c);

// Transverse self-crossings of c on its surface: each unordered crossing is
// reported once with edge1 < edge2 or (edge1 == edge2 and s1 < s2).
std::vector<IntersectionPoint> self_crossings(const PLCurve& c);

PLCurve reversed(const PLCurve& c);
PLCurve translated(const PLCurve& c, const Vec2& v);

} // namespace lagcorr

#endif
