#ifndef LAGCORR_JETLAB_HPP
#define LAGCORR_JETLAB_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "lagcorr/expr.hpp"

namespace lagcorr::jet {

using V2 = std::array<double, 2>;
using V4 = std::array<double, 4>;

// g = (g1, g2) : R^2 -> R^2 x R^2 with g1 = (y1, y2), g2 = (y3, y4).
struct SmoothMap2to4 {
    expr::Symbols symbols;  // exactly two variables
    std::array<expr::Expr, 4> g;
    std::array<std::array<expr::Expr, 2>, 4> d1;                 // d g_i / d x_j
    std::array<std::array<std::array<expr::Expr, 2>, 2>, 4> d2;  // d^2 g_i / d x_j d x_k
    std::vector<double> params;
};

SmoothMap2to4 make_map(const expr::Symbols& symbols, std::array<expr::Expr, 4> g, std::vector<double> params = {});
SmoothMap2to4 parse_map(const std::array<std::string, 4>& g, std::vector<std::string> vars = {"x1", "x2"},
                        std::vector<std::string> param_names = {}, std::vector<double> params = {});

struct Jet {
    V4 value;
    std::array<V2, 4> jac;
    std::array<std::array<V2, 2>, 4> hess;

    double det(int leg) const;               // det of the 2x2 block of leg 1 or 2
    V2 det_gradient(int leg) const;
    double pullback() const { return det(1) - det(2); }  // g*(w1 x (-w2))(d1, d2)
};

Jet evaluate_jet(const SmoothMap2to4& m, double x1, double x2);

struct Window {
    double u0 = -1, u1 = 1, v0 = -1, v1 = 1;
    double scale() const;
};

struct JetSample {
    V4 value;
    std::array<V2, 4> jac;
    double det1 = 0, det2 = 0, pullback = 0;
};

struct JetField {
    Window window;
    int n = 0;
    std::vector<JetSample> samples;  // samples[i * n + j] at (u_i, v_j)
    double max_det_difference = 0;
    double max_pullback = 0;

    double u(int i) const { return window.u0 + (window.u1 - window.u0) * i / (n - 1); }
    double v(int j) const { return window.v0 + (window.v1 - window.v0) * j / (n - 1); }
    const JetSample& at(int i, int j) const { return samples[static_cast<std::size_t>(i * n + j)]; }
    double cell() const;
};

struct Thresholds {
    double lag = 1e-9;
    double reg = 1e-6;   // times the window scale
    double ang = 1e-2;
    double cusp = 1e-4;  // times the second derivative scale
};

// Samples the map on an n x n grid; threads <= 0 reads LAGCORR_THREADS.
JetField analyze(const SmoothMap2to4& m, const Window& w, int n, int threads = 0);
bool is_lagrangian(const JetField& f, const Thresholds& th = {});

enum class PointTag { Fold, CuspCandidate };

struct LocusVertex {
    V2 x;
    double det = 0;
    V2 gradient;
    V2 kernel;
    V2 cokernel;
    V2 tangent;
    double cusp_score = 0;
    PointTag tag = PointTag::Fold;
};

struct Polyline {
    std::vector<LocusVertex> vertices;
    bool closed = false;
};

struct CuspPoint {
    V2 x;
    int polyline = 0;
    double position = 0;  // segment index plus fraction
    double sin_angle = 0;
    double score = 0;
    double score_derivative = 0;
    bool s11_transverse = false;
};

struct SingularLocus {
    int leg = 1;
    std::vector<Polyline> polylines;
    std::vector<CuspPoint> cusps;

    std::size_t vertex_count() const;
    std::size_t count(PointTag t) const;
};

// Zero set of det(dg_leg) by marching squares, with jet data attached.
SingularLocus extract_singular_locus(const JetField& f, const SmoothMap2to4& m, int leg = 1);

struct TransversalityReport {
    double min_gradient = 0;
    double threshold = 0;
    bool transverse = false;
};

TransversalityReport check_transversality(const JetField& f, const SingularLocus& locus, const Thresholds& th = {});

// Tags fold and cusp points; throws NotTransverse when the locus is not cut
// out transversely.
SingularLocus classify_singular_points(const JetField& f, const SmoothMap2to4& m, SingularLocus locus,
                                       const Thresholds& th = {});

// G : R^4 -> R^4 with variables x1..x4, a local extension of g.
struct SmoothMap4to4 {
    expr::Symbols symbols;  // exactly four variables
    std::array<expr::Expr, 4> G;
    std::vector<double> params;
};

SmoothMap4to4 parse_map4(const std::array<std::string, 4>& G, std::vector<std::string> param_names = {},
                         std::vector<double> params = {});

enum class PerturbKind { FirstType, SecondType };

struct PerturbationSpec {
    PerturbKind kind = PerturbKind::FirstType;
    mpq_class r, s;  // FirstType: h = r/2 x1^2 + s x1 x2 - r/2 x2^2
    mpq_class t;
};

// r and s read off dG at the origin: r = dG4/dx3, s = dG4/dx4.
PerturbationSpec first_type_from_jacobian(const SmoothMap4to4& G, const mpq_class& t);

// FirstType: g^t(x1,x2) = G(x1, x2, t h_x1, t h_x2).
// SecondType: g^t(x1,x3) = G(x1, t h_x1, x3, t h_x3) with h = x1 x3^2.
SmoothMap2to4 perturb(const SmoothMap4to4& G, const PerturbationSpec& spec);

// Draws t uniformly from (0, delta) until accept(t) holds, at most 100 draws.
// Returns the accepted t and the number of draws; throws NoParameter.
std::pair<double, int> select_parameter(std::uint64_t seed, double delta, const std::function<bool(double)>& accept);

// Time-t flow of h = rho(|y|^2/eps)(y1^2+y2^2)/2 for w = dy1^dy2 - dy3^dy4.
class HamiltonianRotation {
public:
    HamiltonianRotation(double eps, double t, double step = 0);
    V4 operator()(const V4& y) const;
    double eps() const { return eps_; }
    double time() const { return t_; }

private:
    V4 field(const V4& y) const;
    double eps_, t_, step_;
};

// Central-difference Jacobian of a map R^4 -> R^4.
std::array<V4, 4> numeric_jacobian(const std::function<V4(const V4&)>& f, const V4& y, double h);
// max |J^T Omega J - Omega| with Omega = diag(J2, -J2)
double symplectic_defect(const std::array<V4, 4>& J);

// Smooth fold-twist map (x, t^2, x + pi m(t), t^2), m rising from 0 to 2n on
// [-3/4, 3/4] through the shipped bump.
SmoothMap2to4 fold_twist_map(int n);
// (x1, x1 x2 + x2^3) paired with the identity
SmoothMap2to4 cusp_model_map();
// (x1, x2^2) paired with (x1 + x2, x2^2): a fold for both legs along x2 = 0
SmoothMap2to4 bifold_map();

void write_locus_csv(const SingularLocus& l, std::ostream& out);
void write_locus_svg(const JetField& f, const SingularLocus& l, std::ostream& out);

} // namespace lagcorr::jet

#endif
