#ifndef LAGCORR_FLOER_HPP
#define LAGCORR_FLOER_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lagcorr/correspond.hpp"

namespace lagcorr {

// An embedded lune between a lift of c1 component curve1 and a lift of c2
// component curve2, with corners at generators from (x+) and to (x-).
struct Bigon {
    int from = 0, to = 0;
    int curve1 = 0, curve2 = 0;
    std::vector<Vec2> arc1, arc2;  // from x+ to x-, in the universal cover
    std::vector<Vec2> polygon;     // counterclockwise, starting at x+ along arc2
    bool convex_from = true, convex_to = true;
};

using Matrix = std::vector<std::vector<std::uint8_t>>;

struct FloerComplex {
    FlatSurface surface;
    MultiCurve c1, c2;
    std::vector<IntersectionPoint> generators;
    Matrix matrix;  // matrix[x-][x+]
    std::vector<Bigon> bigons;
    bool exact = true;
    Q tolerance = 0;

    std::size_t size() const { return generators.size(); }
};

std::vector<Bigon> enumerate_bigons(const MultiCurve& c1, const MultiCurve& c2,
                                    const std::vector<IntersectionPoint>& generators);
std::vector<Bigon> enumerate_bigons(const MultiCurve& c1, const MultiCurve& c2);

FloerComplex differential(const MultiCurve& c1, const MultiCurve& c2);
FloerComplex differential(const PLCurve& c1, const PLCurve& c2);

Matrix multiply_mod2(const Matrix& a, const Matrix& b);
bool squares_to_zero(const FloerComplex& c);

struct EntryComparison {
    int row = 0, col = 0;  // triple indices
    std::uint8_t left = 0, right = 0, lifted = 0;
    bool flagged = false;
};

struct ComparisonReport {
    Bijection bijection;
    FloerComplex left;    // CF(L1 o F, L2; F2)
    FloerComplex right;   // CF(L1, F o L2; F1)
    FloerComplex lifted;  // CF(L1~, L2~; F), covering correspondences only
    std::vector<EntryComparison> entries;  // every entry, in triple order
    std::vector<EntryComparison> disagreements;
    std::vector<int> flagged_left, flagged_right;  // bigon indices meeting a bisingular image
    bool agree = false;
    bool exact = true;
    bool restricted = false;  // verdict only over unflagged entries
};

ComparisonReport compare_complexes(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2);
ComparisonReport conjecture_report(const PLCurve& l1, const Correspondence& corr, const PLCurve& l2,
                                   const Q& tau = default_fold_tolerance());

void write_csv(const FloerComplex& c, std::ostream& out);
void write_svg(const FloerComplex& c, std::ostream& out);

} // namespace lagcorr

#endif
