#ifndef LAGCORR_CORRESPOND_HPP
#define LAGCORR_CORRESPOND_HPP

#include <optional>
#include <string>
#include <vector>

#include "lagcorr/curves.hpp"

namespace lagcorr {

// A leg g : F -> F_i of a correspondence. FoldTwist legs are fold o twist,
// with an optional twist profile.
struct CorrLeg {
    enum class Kind { Covering, FoldTwist };
    Kind kind = Kind::Covering;
    CoveringMap covering;
    FoldMap fold;
    std::optional<TwistProfile> twist;

    const FlatSurface& source() const { return kind == Kind::Covering ? covering.source : fold.source; }
    const FlatSurface& target() const { return kind == Kind::Covering ? covering.target : fold.target; }
    // theta offset m(t) c / 2 added by the twist
    Q shift(const Q& t) const;
    double shift(double t) const;
    Vec2 apply(const Vec2& x) const;
};

CorrLeg covering_leg(const CoveringMap& cov);
CorrLeg fold_leg(const Q& circumference, std::optional<TwistProfile> twist);

struct Correspondence {
    FlatSurface domain;
    CorrLeg leg1, leg2;

    bool is_covering() const
    {
        return leg1.kind == CorrLeg::Kind::Covering && leg2.kind == CorrLeg::Kind::Covering;
    }
};

// Validates that both legs start on one domain, that the leg kinds match and
// that a fold pair has rank two along t = 0. Throws InvalidCorrespondence.
Correspondence make_correspondence(CorrLeg leg1, CorrLeg leg2);

// Where a component of a composed curve came from: the input arc (deck
// coset for coverings) and, per edge, the sheet of the domain it runs on
// (+1 / -1 for fold sheets, 0 for coverings).
struct ComponentOrigin {
    int arc = 0;
    std::vector<int> edge_sheet;
};

struct Composition {
    MultiCurve curves;    // on the far surface
    MultiCurve preimage;  // on the domain, curves[i] is the far image of preimage[i]
    std::vector<ComponentOrigin> origin;
    bool exact = true;
    Q tolerance = 0;
};

inline const Q& default_fold_tolerance()
{
    static const Q tau(1, 1000000);
    return tau;
}

Composition compose_left(const PLCurve& l1, const Correspondence& corr, const Q& tau = default_fold_tolerance());
Composition compose_right(const Correspondence& corr, const PLCurve& l2, const Q& tau = default_fold_tolerance());

// A point of F x_{F1 x F2} (L1 x L2): x on the domain, where the preimage of
// L1 (curve1) meets the preimage of L2 (curve2).
struct Triple {
    IntersectionPoint x;
    Vec2 image1, image2;  // g1(x), g2(x) in plane coordinates
    int sheet = 0;        // sign of t on fold domains, 0 for coverings
};

struct QuiltedGenerators {
    Composition left, right;  // left.preimage and right.preimage meet in the triples
    std::vector<Triple> triples;
    bool exact = true;
};

QuiltedGenerators quilted_generators(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2,
                                     const Q& tau = default_fold_tolerance());

// Generators of CF(L1 o F, L2; F2) (left), CF(L1, F o L2; F1) (right) and the
// quilted triples, with triple k matched to left[to_left[k]] and
// right[to_right[k]].
struct Bijection {
    QuiltedGenerators quilt;
    std::vector<IntersectionPoint> left, right;
    std::vector<int> to_left, to_right;
    bool valid = false;
    bool exact = true;
    std::string problem;
};

Bijection generator_bijection(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2,
                              const Q& tau = default_fold_tolerance());

struct DomainCircle {
    FlatSurface surface;
    Q height;
};

std::vector<DomainCircle> bisingular_circles(const Correspondence& corr);

// True iff p lies on some component of c (exact, up to deck translations).
bool point_on_curve(const MultiCurve& c, const Vec2& p);

} // namespace lagcorr

#endif
