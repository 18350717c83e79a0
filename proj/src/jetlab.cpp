#include "lagcorr/jetlab.hpp"
#include "lagcorr/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <random>
#include <thread>
#include <tuple>

namespace lagcorr::jet {

namespace {

double norm(const V2& v) { return std::hypot(v[0], v[1]); }
double dot2(const V2& a, const V2& b) { return a[0] * b[0] + a[1] * b[1]; }
double cross2(const V2& a, const V2& b) { return a[0] * b[1] - a[1] * b[0]; }

V2 unit(const V2& v)
{
    double n = norm(v);
    if (n == 0) return {0, 0};
    return {v[0] / n, v[1] / n};
}

double eval(const SmoothMap2to4& m, const expr::Expr& e, double x1, double x2)
{
    double xs[2] = {x1, x2};
    return expr::evaluate(e, xs, m.params);
}

int env_threads()
{
    const char* s = std::getenv("LAGCORR_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v > 0 ? v : 1;
}

} // namespace

SmoothMap2to4 make_map(const expr::Symbols& symbols, std::array<expr::Expr, 4> g, std::vector<double> params)
{
    if (symbols.vars.size() != 2) throw Error("InvalidMap", "a surface map needs exactly two variables");
    if (params.size() != symbols.params.size()) throw Error("InvalidMap", "parameter values do not match the declared names");
    SmoothMap2to4 m;
    m.symbols = symbols;
    m.g = std::move(g);
    m.params = std::move(params);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) {
            m.d1[i][j] = expr::differentiate(m.g[i], j);
            for (int k = 0; k < 2; ++k) m.d2[i][j][k] = expr::differentiate(m.d1[i][j], k);
        }
    return m;
}

SmoothMap2to4 parse_map(const std::array<std::string, 4>& g, std::vector<std::string> vars,
                        std::vector<std::string> param_names, std::vector<double> params)
{
    expr::Symbols syms{std::move(vars), std::move(param_names)};
    std::array<expr::Expr, 4> e;
    for (int i = 0; i < 4; ++i) e[i] = expr::parse(g[i], syms);
    return make_map(syms, std::move(e), std::move(params));
}

double Jet::det(int leg) const
{
    int a = 2 * (leg - 1), b = a + 1;
    return jac[a][0] * jac[b][1] - jac[a][1] * jac[b][0];
}

V2 Jet::det_gradient(int leg) const
{
    int a = 2 * (leg - 1), b = a + 1;
    V2 out;
    for (int k = 0; k < 2; ++k)
        out[k] = hess[a][0][k] * jac[b][1] + jac[a][0] * hess[b][1][k] - hess[a][1][k] * jac[b][0] -
                 jac[a][1] * hess[b][0][k];
    return out;
}

Jet evaluate_jet(const SmoothMap2to4& m, double x1, double x2)
{
    Jet j;
    for (int i = 0; i < 4; ++i) {
        j.value[i] = eval(m, m.g[i], x1, x2);
        for (int a = 0; a < 2; ++a) {
            j.jac[i][a] = eval(m, m.d1[i][a], x1, x2);
            for (int b = 0; b < 2; ++b) j.hess[i][a][b] = eval(m, m.d2[i][a][b], x1, x2);
        }
    }
    return j;
}

double Window::scale() const { return std::max(u1 - u0, v1 - v0); }

double JetField::cell() const { return std::max(window.u1 - window.u0, window.v1 - window.v0) / (n - 1); }

JetField analyze(const SmoothMap2to4& m, const Window& w, int n, int threads)
{
    if (n < 16) throw Error("InvalidGrid", "grid needs at least 16 samples per side");
    if (!(w.u0 < w.u1) || !(w.v0 < w.v1) || !std::isfinite(w.scale()))
        throw Error("InvalidGrid", "window must be a finite nonempty rectangle");
    JetField f;
    f.window = w;
    f.n = n;
    f.samples.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    auto rows = [&](int begin, int end) {
        for (int i = begin; i < end; ++i)
            for (int j = 0; j < n; ++j) {
                double x1 = f.u(i), x2 = f.v(j);
                JetSample& s = f.samples[static_cast<std::size_t>(i * n + j)];
                for (int k = 0; k < 4; ++k) {
                    s.value[k] = eval(m, m.g[k], x1, x2);
                    for (int a = 0; a < 2; ++a) s.jac[k][a] = eval(m, m.d1[k][a], x1, x2);
                }
                s.det1 = s.jac[0][0] * s.jac[1][1] - s.jac[0][1] * s.jac[1][0];
                s.det2 = s.jac[2][0] * s.jac[3][1] - s.jac[2][1] * s.jac[3][0];
                // omega(a, b) = a_1 b_2 - a_2 b_1 on each factor, applied to
                // the images of d/dx1 and d/dx2
                double w1 = s.jac[0][0] * s.jac[1][1] - s.jac[1][0] * s.jac[0][1];
                double w2 = s.jac[2][0] * s.jac[3][1] - s.jac[3][0] * s.jac[2][1];
                s.pullback = w1 - w2;
            }
    };
    int t = threads > 0 ? threads : env_threads();
    t = std::max(1, std::min(t, n));
    if (t == 1) {
        rows(0, n);
    }
    else {
        // evaluation errors are rethrown on the calling thread
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
        for (int k = 0; k < t; ++k)
            pool.emplace_back([&, k] {
                try {
                    rows(k * n / t, (k + 1) * n / t);
                }
                catch (...) {
                    errors[static_cast<std::size_t>(k)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (const auto& s : f.samples) {
        f.max_det_difference = std::max(f.max_det_difference, std::abs(s.det1 - s.det2));
        f.max_pullback = std::max(f.max_pullback, std::abs(s.pullback));
    }
    return f;
}

bool is_lagrangian(const JetField& f, const Thresholds& th) { return f.max_pullback < th.lag; }

std::size_t SingularLocus::vertex_count() const
{
    std::size_t c = 0;
    for (const auto& p : polylines) c += p.vertices.size();
    return c;
}

std::size_t SingularLocus::count(PointTag t) const
{
    std::size_t c = 0;
    for (const auto& p : polylines)
        for (const auto& v : p.vertices)
            if (v.tag == t) ++c;
    return c;
}

namespace {

// kernel of a rank-one 2x2 block, from its dominant row
V2 kernel_of(const Jet& j, int leg)
{
    int a = 2 * (leg - 1), b = a + 1;
    V2 r = norm(j.jac[a]) >= norm(j.jac[b]) ? j.jac[a] : j.jac[b];
    return unit({-r[1], r[0]});
}

// unit normal to the image of the block, from its dominant column
V2 cokernel_of(const Jet& j, int leg)
{
    int a = 2 * (leg - 1), b = a + 1;
    V2 c0{j.jac[a][0], j.jac[b][0]}, c1{j.jac[a][1], j.jac[b][1]};
    V2 c = norm(c0) >= norm(c1) ? c0 : c1;
    return unit({-c[1], c[0]});
}

V2 second_along(const Jet& j, int leg, const V2& k)
{
    int a = 2 * (leg - 1);
    V2 out;
    for (int r = 0; r < 2; ++r) {
        const auto& h = j.hess[a + r];
        out[r] = h[0][0] * k[0] * k[0] + 2 * h[0][1] * k[0] * k[1] + h[1][1] * k[1] * k[1];
    }
    return out;
}

struct PointData {
    Jet jet;
    V2 kernel, cokernel, gradient, tangent;
    double score = 0;
};

PointData point_data(const SmoothMap2to4& m, int leg, const V2& x, const V2* kref, const V2* nref, const V2* tref)
{
    PointData d;
    d.jet = evaluate_jet(m, x[0], x[1]);
    d.kernel = kernel_of(d.jet, leg);
    d.cokernel = cokernel_of(d.jet, leg);
    d.gradient = d.jet.det_gradient(leg);
    d.tangent = unit({-d.gradient[1], d.gradient[0]});
    if (kref && dot2(d.kernel, *kref) < 0) d.kernel = {-d.kernel[0], -d.kernel[1]};
    if (nref && dot2(d.cokernel, *nref) < 0) d.cokernel = {-d.cokernel[0], -d.cokernel[1]};
    if (tref && dot2(d.tangent, *tref) < 0) d.tangent = {-d.tangent[0], -d.tangent[1]};
    d.score = dot2(d.cokernel, second_along(d.jet, leg, d.kernel));
    return d;
}

// Newton steps onto det = 0 along the gradient
V2 project_to_locus(const SmoothMap2to4& m, int leg, V2 x)
{
    for (int it = 0; it < 4; ++it) {
        Jet j = evaluate_jet(m, x[0], x[1]);
        V2 g = j.det_gradient(leg);
        double gg = dot2(g, g);
        if (gg == 0) break;
        double d = j.det(leg);
        x = {x[0] - d * g[0] / gg, x[1] - d * g[1] / gg};
    }
    return x;
}

using EdgeKey = std::tuple<int, int, int>;  // 0: (i,j)-(i+1,j), 1: (i,j)-(i,j+1)

} // namespace

SingularLocus extract_singular_locus(const JetField& f, const SmoothMap2to4& m, int leg)
{
    if (leg != 1 && leg != 2) throw Error("InvalidLeg", "leg must be 1 or 2");
    SingularLocus out;
    out.leg = leg;
    int n = f.n;
    auto val = [&](int i, int j) { return leg == 1 ? f.at(i, j).det1 : f.at(i, j).det2; };
    auto pos = [&](int i, int j) { return val(i, j) >= 0; };
    auto crossing = [&](const EdgeKey& e) -> V2 {
        auto [kind, i, j] = e;
        int i2 = kind == 0 ? i + 1 : i, j2 = kind == 0 ? j : j + 1;
        double a = val(i, j), b = val(i2, j2);
        double l = a == b ? 0.5 : a / (a - b);
        return {f.u(i) + l * (f.u(i2) - f.u(i)), f.v(j) + l * (f.v(j2) - f.v(j))};
    };

    // segments of each cell, keyed by the crossed cell edges
    std::map<EdgeKey, std::vector<EdgeKey>> adj;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            EdgeKey bottom{0, i, j}, top{0, i, j + 1}, left{1, i, j}, right{1, i + 1, j};
            std::vector<EdgeKey> hits;
            if (pos(i, j) != pos(i + 1, j)) hits.push_back(bottom);
            if (pos(i + 1, j) != pos(i + 1, j + 1)) hits.push_back(right);
            if (pos(i, j + 1) != pos(i + 1, j + 1)) hits.push_back(top);
            if (pos(i, j) != pos(i, j + 1)) hits.push_back(left);
            auto link = [&](const EdgeKey& a, const EdgeKey& b) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            };
            if (hits.size() == 2) link(hits[0], hits[1]);
            else if (hits.size() == 4) {
                // saddle: the centre value decides which corners connect
                double c = (val(i, j) + val(i + 1, j) + val(i, j + 1) + val(i + 1, j + 1)) / 4;
                if ((c >= 0) == pos(i, j)) {
                    link(bottom, right);
                    link(top, left);
                }
                else {
                    link(bottom, left);
                    link(right, top);
                }
            }
        }

    std::map<EdgeKey, bool> used;
    auto walk = [&](const EdgeKey& start) {
        std::vector<EdgeKey> chain{start};
        used[start] = true;
        EdgeKey cur = start;
        for (;;) {
            bool moved = false;
            for (const auto& nx : adj[cur])
                if (!used[nx]) {
                    used[nx] = true;
                    chain.push_back(nx);
                    cur = nx;
                    moved = true;
                    break;
                }
            if (!moved) break;
        }
        return chain;
    };
    std::vector<std::pair<std::vector<EdgeKey>, bool>> chains;
    // open chains start at an end, then the closed loops
    for (const auto& [k, nb] : adj)
        if (nb.size() == 1 && !used[k]) chains.push_back({walk(k), false});
    for (const auto& [k, nb] : adj)
        if (!used[k]) {
            auto c = walk(k);
            bool closed = c.size() > 2;
            chains.push_back({std::move(c), closed});
        }

    for (auto& [chain, closed] : chains) {
        Polyline pl;
        pl.closed = closed;
        const V2 *kref = nullptr, *nref = nullptr;
        V2 kprev{}, nprev{}, xprev{};
        for (const auto& e : chain) {
            V2 x = crossing(e);
            if (!pl.vertices.empty() && std::abs(x[0] - xprev[0]) + std::abs(x[1] - xprev[1]) < 1e-14) continue;
            V2 dir{0, 0};
            if (!pl.vertices.empty()) dir = {x[0] - xprev[0], x[1] - xprev[1]};
            PointData d = point_data(m, leg, x, kref, nref, pl.vertices.empty() ? nullptr : &dir);
            LocusVertex v;
            v.x = x;
            v.det = d.jet.det(leg);
            v.gradient = d.gradient;
            v.kernel = d.kernel;
            v.cokernel = d.cokernel;
            v.tangent = d.tangent;
            v.cusp_score = d.score;
            pl.vertices.push_back(v);
            kprev = d.kernel;
            nprev = d.cokernel;
            xprev = x;
            kref = &kprev;
            nref = &nprev;
        }
        // orient the first tangent along the polyline
        if (pl.vertices.size() > 1) {
            auto& v0 = pl.vertices[0];
            V2 dir{pl.vertices[1].x[0] - v0.x[0], pl.vertices[1].x[1] - v0.x[1]};
            if (dot2(v0.tangent, dir) < 0) v0.tangent = {-v0.tangent[0], -v0.tangent[1]};
        }
        if (pl.closed && pl.vertices.size() < 3) pl.closed = false;
        if (!pl.vertices.empty()) out.polylines.push_back(std::move(pl));
    }
    return out;
}

TransversalityReport check_transversality(const JetField& f, const SingularLocus& locus, const Thresholds& th)
{
    TransversalityReport r;
    r.threshold = th.reg * f.window.scale();
    r.min_gradient = INFINITY;
    for (const auto& p : locus.polylines)
        for (const auto& v : p.vertices) r.min_gradient = std::min(r.min_gradient, norm(v.gradient));
    if (locus.vertex_count() == 0) r.min_gradient = 0;
    r.transverse = locus.vertex_count() > 0 && r.min_gradient > r.threshold;
    return r;
}

SingularLocus classify_singular_points(const JetField& f, const SmoothMap2to4& m, SingularLocus locus,
                                       const Thresholds& th)
{
    TransversalityReport tr = check_transversality(f, locus, th);
    if (!tr.transverse) throw Error("NotTransverse", "0 is not a regular value of the Jacobian determinant on the locus");
    int leg = locus.leg;
    double scale2 = 0;
    for (const auto& p : locus.polylines)
        for (const auto& v : p.vertices) {
            Jet j = evaluate_jet(m, v.x[0], v.x[1]);
            V2 s = second_along(j, leg, v.kernel);
            scale2 = std::max(scale2, norm(s));
        }
    if (scale2 == 0) scale2 = 1;
    double cusp_tol = th.cusp * scale2;
    double reg_tol = th.reg * f.window.scale();
    locus.cusps.clear();

    for (std::size_t pi = 0; pi < locus.polylines.size(); ++pi) {
        auto& pl = locus.polylines[pi];
        for (auto& v : pl.vertices) v.tag = PointTag::Fold;
        std::size_t nv = pl.vertices.size();
        std::size_t nseg = pl.closed ? nv : (nv == 0 ? 0 : nv - 1);
        for (std::size_t s = 0; s < nseg; ++s) {
            const LocusVertex& a = pl.vertices[s];
            const LocusVertex& b = pl.vertices[(s + 1) % nv];
            const V2& nref = a.cokernel;
            if (!(a.cusp_score == 0 || (a.cusp_score > 0) != (b.cusp_score > 0))) continue;
            auto score_at = [&](double l, V2* where, PointData* data) {
                V2 x{a.x[0] + l * (b.x[0] - a.x[0]), a.x[1] + l * (b.x[1] - a.x[1])};
                x = project_to_locus(m, leg, x);
                PointData d = point_data(m, leg, x, &a.kernel, &nref, &a.tangent);
                if (where) *where = x;
                if (data) *data = d;
                return d.score;
            };
            double lo = 0, hi = 1;
            double slo = score_at(lo, nullptr, nullptr);
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double sm = score_at(mid, nullptr, nullptr);
                if ((sm > 0) == (slo > 0) && sm != 0) {
                    lo = mid;
                    slo = sm;
                }
                else {
                    hi = mid;
                }
            }
            CuspPoint c;
            PointData d;
            double root = 0.5 * (lo + hi);
            c.score = score_at(root, &c.x, &d);
            c.polyline = static_cast<int>(pi);
            c.position = static_cast<double>(s) + root;
            c.sin_angle = std::abs(cross2(d.kernel, d.tangent));
            if (!(c.sin_angle < th.ang && std::abs(c.score) < cusp_tol)) continue;
            // derivative of the score along the locus
            double h = f.cell() / 10;
            auto along = [&](double sign) {
                V2 x{c.x[0] + sign * h * d.tangent[0], c.x[1] + sign * h * d.tangent[1]};
                x = project_to_locus(m, leg, x);
                return point_data(m, leg, x, &d.kernel, &d.cokernel, &d.tangent).score;
            };
            c.score_derivative = (along(1) - along(-1)) / (2 * h);
            c.s11_transverse = std::abs(c.score_derivative) > reg_tol;
            // the nearest vertex carries the tag
            std::size_t best = 0;
            double bd = INFINITY;
            for (std::size_t k = 0; k < nv; ++k) {
                double dd = std::hypot(pl.vertices[k].x[0] - c.x[0], pl.vertices[k].x[1] - c.x[1]);
                if (dd < bd) {
                    bd = dd;
                    best = k;
                }
            }
            pl.vertices[best].tag = PointTag::CuspCandidate;
            locus.cusps.push_back(c);
        }
    }
    return locus;
}

SmoothMap4to4 parse_map4(const std::array<std::string, 4>& G, std::vector<std::string> param_names,
                         std::vector<double> params)
{
    if (params.size() != param_names.size()) throw Error("InvalidMap", "parameter values do not match the declared names");
    SmoothMap4to4 m;
    m.symbols = expr::Symbols{{"x1", "x2", "x3", "x4"}, std::move(param_names)};
    for (int i = 0; i < 4; ++i) m.G[i] = expr::parse(G[i], m.symbols);
    m.params = std::move(params);
    return m;
}

PerturbationSpec first_type_from_jacobian(const SmoothMap4to4& G, const mpq_class& t)
{
    double zero[4] = {0, 0, 0, 0};
    PerturbationSpec s;
    s.kind = PerturbKind::FirstType;
    s.r = rationalize(expr::evaluate(expr::differentiate(G.G[3], 2), zero, G.params));
    s.s = rationalize(expr::evaluate(expr::differentiate(G.G[3], 3), zero, G.params));
    s.t = t;
    return s;
}

SmoothMap2to4 perturb(const SmoothMap4to4& G, const PerturbationSpec& spec)
{
    using namespace expr;
    if (G.symbols.vars.size() != 4) throw Error("InvalidMap", "the extension needs four variables");
    std::vector<Expr> repl(4);
    Symbols out;
    out.params = G.symbols.params;
    Expr t = num(spec.t);
    if (spec.kind == PerturbKind::FirstType) {
        out.vars = {"x1", "x2"};
        Expr x1 = var(0, "x1"), x2 = var(1, "x2");
        repl[0] = x1;
        repl[1] = x2;
        repl[2] = mul(t, add(mul(num(spec.r), x1), mul(num(spec.s), x2)));
        repl[3] = mul(t, sub(mul(num(spec.s), x1), mul(num(spec.r), x2)));
    }
    else {
        out.vars = {"x1", "x3"};
        Expr x1 = var(0, "x1"), x3 = var(1, "x3");
        repl[0] = x1;
        repl[1] = mul(t, pow(x3, 2));
        repl[2] = x3;
        repl[3] = mul(t, mul(num(2), mul(x1, x3)));
    }
    std::array<Expr, 4> g;
    for (int i = 0; i < 4; ++i) g[i] = substitute(G.G[i], repl);
    return make_map(out, std::move(g), G.params);
}

std::pair<double, int> select_parameter(std::uint64_t seed, double delta, const std::function<bool(double)>& accept)
{
    if (!(delta > 0)) throw Error("NoParameter", "delta must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, delta);
    for (int draw = 1; draw <= 100; ++draw) {
        double t = dist(rng);
        if (t <= 0) continue;
        if (accept(t)) return {t, draw};
    }
    throw Error("NoParameter", "no acceptable parameter after 100 draws");
}

HamiltonianRotation::HamiltonianRotation(double eps, double t, double step) : eps_(eps), t_(t), step_(step)
{
    if (!(eps > 0)) throw Error("InvalidParameter", "eps must be positive");
    // the field is Lipschitz with a constant of order one, so a fixed time
    // step keeps the RK4 error far below the finite-difference noise
    if (step_ <= 0) step_ = 1.0 / 1024;
}

V4 HamiltonianRotation::field(const V4& y) const
{
    double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    double q = y[0] * y[0] + y[1] * y[1];
    double rho = expr::bump(r2 / eps_), drho = expr::bump(r2 / eps_, 1);
    double h1 = drho * y[0] * q / eps_ + rho * y[0];
    double h2 = drho * y[1] * q / eps_ + rho * y[1];
    double h3 = drho * y[2] * q / eps_;
    double h4 = drho * y[3] * q / eps_;
    return {h2, -h1, -h4, h3};
}

V4 HamiltonianRotation::operator()(const V4& y) const
{
    double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    if (r2 < eps_) {
        double c = std::cos(t_), s = std::sin(t_);
        return {y[0] * c + y[1] * s, -y[0] * s + y[1] * c, y[2], y[3]};
    }
    if (r2 > 2 * eps_) return y;
    long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t_) / step_)));
    double h = t_ / static_cast<double>(steps);
    V4 x = y;
    auto axpy = [](const V4& a, double k, const V4& b) {
        return V4{a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2], a[3] + k * b[3]};
    };
    for (long i = 0; i < steps; ++i) {
        V4 k1 = field(x);
        V4 k2 = field(axpy(x, h / 2, k1));
        V4 k3 = field(axpy(x, h / 2, k2));
        V4 k4 = field(axpy(x, h, k3));
        for (int c = 0; c < 4; ++c) x[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    return x;
}

std::array<V4, 4> numeric_jacobian(const std::function<V4(const V4&)>& f, const V4& y, double h)
{
    std::array<V4, 4> J{};
    for (int j = 0; j < 4; ++j) {
        V4 a = y, b = y;
        a[j] += h;
        b[j] -= h;
        V4 fa = f(a), fb = f(b);
        for (int i = 0; i < 4; ++i) J[i][j] = (fa[i] - fb[i]) / (2 * h);
    }
    return J;
}

double symplectic_defect(const std::array<V4, 4>& J)
{
    double om[4][4] = {{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
    double worst = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double v = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) v += J[i][a] * om[i][j] * J[j][b];
            worst = std::max(worst, std::abs(v - om[a][b]));
        }
    return worst;
}

SmoothMap2to4 fold_twist_map(int n)
{
    std::string m = std::to_string(2 * n) + "*(1 - bump(1 + 2/3*(x2 + 3/4)))";
    return parse_map({"x1", "x2^2", "x1 + pi*" + m, "x2^2"});
}

SmoothMap2to4 cusp_model_map() { return parse_map({"x1", "x1*x2 + x2^3", "x1", "x2"}); }

SmoothMap2to4 bifold_map() { return parse_map({"x1", "x2^2", "x1 + x2", "x2^2"}); }

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_locus_csv(const SingularLocus& l, std::ostream& out)
{
    out << "polyline,vertex,x1,x2,det,grad1,grad2,kernel1,kernel2,tangent1,tangent2,cusp_score,tag\n";
    for (std::size_t p = 0; p < l.polylines.size(); ++p)
        for (std::size_t k = 0; k < l.polylines[p].vertices.size(); ++k) {
            const auto& v = l.polylines[p].vertices[k];
            out << p << ',' << k << ',' << fmt(v.x[0]) << ',' << fmt(v.x[1]) << ',' << fmt(v.det) << ','
                << fmt(v.gradient[0]) << ',' << fmt(v.gradient[1]) << ',' << fmt(v.kernel[0]) << ','
                << fmt(v.kernel[1]) << ',' << fmt(v.tangent[0]) << ',' << fmt(v.tangent[1]) << ','
                << fmt(v.cusp_score) << ',' << (v.tag == PointTag::Fold ? "FOLD" : "CUSP-CANDIDATE") << '\n';
        }
}

void write_locus_svg(const JetField& f, const SingularLocus& l, std::ostream& out)
{
    const double size = 600;
    const Window& w = f.window;
    auto px = [&](double u) { return (u - w.u0) / (w.u1 - w.u0) * size; };
    auto py = [&](double v) { return size - (v - w.v0) / (w.v1 - w.v0) * size; };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    int stride = std::max(1, f.n / 100);
    double top = 0;
    for (const auto& s : f.samples) top = std::max(top, std::abs(l.leg == 1 ? s.det1 : s.det2));
    if (top == 0) top = 1;
    double cw = size / (f.n - 1) * stride;
    for (int i = 0; i + stride < f.n; i += stride)
        for (int j = 0; j + stride < f.n; j += stride) {
            double d = l.leg == 1 ? f.at(i, j).det1 : f.at(i, j).det2;
            int c = static_cast<int>(255 * (1 - std::min(1.0, std::abs(d) / top)));
            out << "<rect x=\"" << fmt(px(f.u(i))) << "\" y=\"" << fmt(py(f.v(j + stride))) << "\" width=\"" << fmt(cw)
                << "\" height=\"" << fmt(cw) << "\" fill=\"rgb(" << (d >= 0 ? 255 : c) << ',' << c << ','
                << (d >= 0 ? c : 255) << ")\"/>\n";
        }
    for (const auto& p : l.polylines) {
        out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
        for (const auto& v : p.vertices) out << fmt(px(v.x[0])) << ',' << fmt(py(v.x[1])) << ' ';
        if (p.closed && !p.vertices.empty())
            out << fmt(px(p.vertices[0].x[0])) << ',' << fmt(py(p.vertices[0].x[1]));
        out << "\"/>\n";
    }
    for (const auto& c : l.cusps)
        out << "<circle r=\"5\" fill=\"none\" stroke=\"#00a060\" stroke-width=\"2\" cx=\"" << fmt(px(c.x[0]))
            << "\" cy=\"" << fmt(py(c.x[1])) << "\"/>\n";
    out << "</svg>\n";
}

} // namespace lagcorr::jet
