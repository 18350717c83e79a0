#include "lagcorr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "lagcorr/floer.hpp"

namespace lagcorr {

using nlohmann::json;

std::string to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::FloerCompare: return "floer-compare";
    case ScenarioKind::QuiltReport: return "quilt-report";
    case ScenarioKind::SingularAnalyze: return "singular-analyze";
    case ScenarioKind::Perturb: return "perturb";
    case ScenarioKind::Selftest: return "selftest";
    }
    return "?";
}

namespace {

std::string child(const std::string& ptr, const std::string& key)
{
    // JSON pointer escaping
    std::string k;
    for (char c : key) {
        if (c == '~') k += "~0";
        else if (c == '/') k += "~1";
        else k += c;
    }
    return ptr + "/" + k;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& require(const json& j, const std::string& ptr, const std::string& key)
{
    if (!j.is_object()) throw SchemaError(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(child(ptr, key), "required field missing");
    return *it;
}

const json* optional_field(const json& j, const std::string& key)
{
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

Q read_q(const json& j, const std::string& ptr)
{
    if (j.is_number_integer()) return Q(j.get<long>());
    if (!j.is_string()) throw SchemaError(ptr, "expected a rational written as \"p/q\"");
    try {
        return parse_rational(j.get<std::string>());
    }
    catch (const Error& e) {
        throw SchemaError(ptr, e.what());
    }
}

double read_double(const json& j, const std::string& ptr)
{
    if (j.is_number()) return j.get<double>();
    return read_q(j, ptr).get_d();
}

long read_int(const json& j, const std::string& ptr)
{
    if (!j.is_number_integer()) throw SchemaError(ptr, "expected an integer");
    return j.get<long>();
}

std::string read_string(const json& j, const std::string& ptr)
{
    if (!j.is_string()) throw SchemaError(ptr, "expected a string");
    return j.get<std::string>();
}

const json& read_array(const json& j, const std::string& ptr, std::size_t size = 0)
{
    if (!j.is_array()) throw SchemaError(ptr, "expected an array");
    if (size && j.size() != size) throw SchemaError(ptr, "expected " + std::to_string(size) + " entries");
    return j;
}

Vec2 read_vec(const json& j, const std::string& ptr)
{
    read_array(j, ptr, 2);
    return {read_q(j[0], child(ptr, 0)), read_q(j[1], child(ptr, 1))};
}

FlatSurface read_surface(const json& j, const std::string& ptr)
{
    std::string kind = read_string(require(j, ptr, "kind"), child(ptr, "kind"));
    try {
        if (kind == "torus") {
            std::string bp = child(ptr, "basis");
            const json& b = read_array(require(j, ptr, "basis"), bp, 2);
            return make_torus(read_vec(b[0], child(bp, 0)), read_vec(b[1], child(bp, 1)));
        }
        if (kind == "cylinder") {
            Q c = read_q(require(j, ptr, "circumference"), child(ptr, "circumference"));
            Q h0(-1), h1(1);
            if (const json* h = optional_field(j, "height")) {
                Vec2 v = read_vec(*h, child(ptr, "height"));
                h0 = v.x;
                h1 = v.y;
            }
            return make_cylinder(c, h0, h1);
        }
    }
    catch (const SchemaError&) {
        throw;
    }
    catch (const Error& e) {
        throw SchemaError(ptr, e.what());
    }
    throw SchemaError(child(ptr, "kind"), "unknown surface kind \"" + kind + "\"");
}

const FlatSurface& lookup_surface(const Scenario& sc, const json& j, const std::string& ptr)
{
    std::string name = read_string(j, ptr);
    auto it = sc.surfaces.find(name);
    if (it == sc.surfaces.end()) throw SchemaError(ptr, "unknown surface \"" + name + "\"");
    return it->second;
}

PLCurve read_curve(const Scenario& sc, const json& j, const std::string& ptr)
{
    const FlatSurface& surface = lookup_surface(sc, require(j, ptr, "surface"), child(ptr, "surface"));
    std::string vp = child(ptr, "vertices");
    const json& vs = read_array(require(j, ptr, "vertices"), vp);
    std::vector<Vec2> vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) vertices.push_back(read_vec(vs[i], child(vp, i)));
    Vec2 hol = read_vec(require(j, ptr, "holonomy"), child(ptr, "holonomy"));
    if (const json* n = optional_field(j, "nudge")) {
        Vec2 d = read_vec(*n, child(ptr, "nudge"));
        for (auto& v : vertices) v = v + d;
    }
    try {
        PLCurve c = make_curve(surface, std::move(vertices), hol);
        if (!embedded_lift_check(c)) throw SchemaError(ptr, "curve lift is not embedded");
        return c;
    }
    catch (const SchemaError&) {
        throw;
    }
    catch (const Error& e) {
        throw SchemaError(ptr, e.what());
    }
}

CorrLeg read_leg(const Scenario& sc, const FlatSurface& domain, const json& j, const std::string& ptr)
{
    std::string type = read_string(require(j, ptr, "type"), child(ptr, "type"));
    try {
        if (type == "covering") {
            const FlatSurface& target = lookup_surface(sc, require(j, ptr, "target"), child(ptr, "target"));
            return covering_leg(covering_from_sublattice(domain, target));
        }
        if (type == "foldtwist") {
            if (domain.is_torus()) throw SchemaError(ptr, "fold legs need a cylinder domain");
            FoldMap fold = make_fold(domain.circumference);
            if (!(fold.source == domain)) throw SchemaError(ptr, "fold domain must have heights [-1, 1]");
            long n = 0;
            if (const json* nj = optional_field(j, "n")) n = read_int(*nj, child(ptr, "n"));
            bool good = false;
            if (const json* g = optional_field(j, "good")) {
                if (!g->is_boolean()) throw SchemaError(child(ptr, "good"), "expected a boolean");
                good = g->get<bool>();
            }
            std::optional<TwistProfile> twist;
            if (const json* p = optional_field(j, "profile")) {
                std::string pp = child(ptr, "profile");
                read_array(*p, pp);
                std::vector<std::pair<Q, Q>> pts;
                for (std::size_t i = 0; i < p->size(); ++i) {
                    Vec2 v = read_vec((*p)[i], child(pp, i));
                    pts.push_back({v.x, v.y});
                }
                try {
                    twist = make_profile(std::move(pts), static_cast<int>(n), good);
                }
                catch (const Error& e) {
                    throw SchemaError(pp, e.what());
                }
            }
            else if (good) {
                twist = good_map_profile();
            }
            else if (n > 0) {
                twist = dehn_twist_profile(static_cast<int>(n));
            }
            else if (n < 0) {
                throw SchemaError(child(ptr, "n"), "twist count must be nonnegative");
            }
            return fold_leg(domain.circumference, twist);
        }
    }
    catch (const SchemaError&) {
        throw;
    }
    catch (const Error& e) {
        throw SchemaError(ptr, e.what());
    }
    throw SchemaError(child(ptr, "type"), "unknown leg type \"" + type + "\"");
}

// parameter names and values; object keys come out sorted
void read_params(const json* j, const std::string& ptr, std::vector<std::string>& names, std::vector<double>& values)
{
    if (!j) return;
    if (!j->is_object()) throw SchemaError(ptr, "expected an object of parameter values");
    for (auto it = j->begin(); it != j->end(); ++it) {
        names.push_back(it.key());
        values.push_back(read_double(it.value(), child(ptr, it.key())));
    }
}

jet::SmoothMap2to4 read_map(const json& j, const std::string& ptr)
{
    std::vector<std::string> vars{"x1", "x2"};
    if (const json* v = optional_field(j, "vars")) {
        std::string vp = child(ptr, "vars");
        read_array(*v, vp, 2);
        vars = {read_string((*v)[0], child(vp, 0)), read_string((*v)[1], child(vp, 1))};
    }
    std::vector<std::string> names;
    std::vector<double> values;
    read_params(optional_field(j, "params"), child(ptr, "params"), names, values);
    std::string gp = child(ptr, "g");
    const json& g = read_array(require(j, ptr, "g"), gp, 4);
    expr::Symbols syms{vars, names};
    std::array<expr::Expr, 4> e;
    for (std::size_t i = 0; i < 4; ++i) {
        try {
            e[i] = expr::parse(read_string(g[i], child(gp, i)), syms);
        }
        catch (const SchemaError&) {
            throw;
        }
        catch (const Error& err) {
            throw SchemaError(child(gp, i), err.what());
        }
    }
    return jet::make_map(syms, std::move(e), std::move(values));
}

jet::SmoothMap4to4 read_map4(const json& j, const std::string& ptr)
{
    std::vector<std::string> names;
    std::vector<double> values;
    read_params(optional_field(j, "params"), child(ptr, "params"), names, values);
    std::string gp = child(ptr, "G");
    const json& g = read_array(require(j, ptr, "G"), gp, 4);
    std::array<std::string, 4> s;
    for (std::size_t i = 0; i < 4; ++i) s[i] = read_string(g[i], child(gp, i));
    try {
        return jet::parse_map4(s, names, values);
    }
    catch (const Error& err) {
        throw SchemaError(gp, err.what());
    }
}

jet::Window read_window(const json& j, const std::string& ptr)
{
    read_array(j, ptr, 4);
    jet::Window w{read_double(j[0], child(ptr, 0)), read_double(j[1], child(ptr, 1)), read_double(j[2], child(ptr, 2)),
                  read_double(j[3], child(ptr, 3))};
    if (!(w.u0 < w.u1 && w.v0 < w.v1)) throw SchemaError(ptr, "window must be [u0, u1, v0, v1] with u0 < u1, v0 < v1");
    return w;
}

void read_thresholds(const json& j, const std::string& ptr, jet::Thresholds& th)
{
    if (!j.is_object()) throw SchemaError(ptr, "expected an object");
    std::pair<const char*, double*> fields[] = {{"lag", &th.lag}, {"reg", &th.reg}, {"ang", &th.ang}, {"cusp", &th.cusp}};
    for (auto& [k, dst] : fields)
        if (const json* v = optional_field(j, k)) {
            *dst = read_double(*v, child(ptr, k));
            if (!(*dst > 0)) throw SchemaError(child(ptr, k), "threshold must be positive");
        }
}

ScenarioKind read_kind(const json& j, const std::string& ptr)
{
    std::string k = read_string(j, ptr);
    for (ScenarioKind s : {ScenarioKind::FloerCompare, ScenarioKind::QuiltReport, ScenarioKind::SingularAnalyze,
                           ScenarioKind::Perturb, ScenarioKind::Selftest})
        if (to_string(s) == k) return s;
    throw SchemaError(ptr, "unknown scenario kind \"" + k + "\"");
}

Scenario from_json(const json& doc)
{
    if (!doc.is_object()) throw SchemaError("", "scenario must be a JSON object");
    Scenario sc;
    long version = read_int(require(doc, "", "version"), "/version");
    if (version != scenario_version)
        throw SchemaError("/version", "unsupported version " + std::to_string(version));
    sc.kind = read_kind(require(doc, "", "kind"), "/kind");
    if (const json* n = optional_field(doc, "name")) sc.name = read_string(*n, "/name");
    if (const json* s = optional_field(doc, "seed")) {
        if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
            throw SchemaError("/seed", "expected a nonnegative integer");
        sc.seed = s->get<std::uint64_t>();
    }
    if (const json* s = optional_field(doc, "surfaces")) {
        if (!s->is_object()) throw SchemaError("/surfaces", "expected an object of named surfaces");
        for (auto it = s->begin(); it != s->end(); ++it)
            sc.surfaces[it.key()] = read_surface(it.value(), child("/surfaces", it.key()));
    }
    if (const json* c = optional_field(doc, "curves")) {
        read_array(*c, "/curves");
        for (std::size_t i = 0; i < c->size(); ++i) sc.curves.push_back(read_curve(sc, (*c)[i], child("/curves", i)));
    }
    if (const json* t = optional_field(doc, "tau")) {
        sc.tau = read_q(*t, "/tau");
        if (sgn(sc.tau) <= 0) throw SchemaError("/tau", "tolerance must be positive");
    }
    if (const json* c = optional_field(doc, "correspondence")) {
        const std::string p = "/correspondence";
        const FlatSurface& domain = lookup_surface(sc, require(*c, p, "domain"), p + "/domain");
        CorrLeg l1 = read_leg(sc, domain, require(*c, p, "leg1"), p + "/leg1");
        CorrLeg l2 = read_leg(sc, domain, require(*c, p, "leg2"), p + "/leg2");
        try {
            sc.correspondence = make_correspondence(std::move(l1), std::move(l2));
        }
        catch (const Error& e) {
            throw SchemaError(p, e.what());
        }
    }
    if (const json* m = optional_field(doc, "map")) sc.map = read_map(*m, "/map");
    if (const json* l = optional_field(doc, "legs")) {
        read_array(*l, "/legs");
        sc.legs.clear();
        for (std::size_t i = 0; i < l->size(); ++i) {
            long v = read_int((*l)[i], child("/legs", i));
            if (v != 1 && v != 2) throw SchemaError(child("/legs", i), "leg must be 1 or 2");
            sc.legs.push_back(static_cast<int>(v));
        }
        if (sc.legs.empty()) throw SchemaError("/legs", "at least one leg required");
    }
    if (const json* w = optional_field(doc, "window")) sc.window = read_window(*w, "/window");
    if (const json* g = optional_field(doc, "grid")) {
        sc.grid = static_cast<int>(read_int(*g, "/grid"));
        if (sc.grid < 16) throw SchemaError("/grid", "grid needs at least 16 samples per side");
    }
    if (const json* t = optional_field(doc, "thresholds")) read_thresholds(*t, "/thresholds", sc.thresholds);
    if (const json* e = optional_field(doc, "extension")) sc.extension = read_map4(*e, "/extension");
    if (const json* p = optional_field(doc, "perturbation")) {
        const std::string pp = "/perturbation";
        std::string type = read_string(require(*p, pp, "type"), pp + "/type");
        if (type == "first") sc.perturbation.kind = jet::PerturbKind::FirstType;
        else if (type == "second") sc.perturbation.kind = jet::PerturbKind::SecondType;
        else throw SchemaError(pp + "/type", "expected \"first\" or \"second\"");
        if (const json* t = optional_field(*p, "t")) sc.perturbation.t = read_q(*t, pp + "/t");
        if (const json* d = optional_field(*p, "delta")) {
            sc.perturbation.delta = read_double(*d, pp + "/delta");
            if (!(sc.perturbation.delta > 0)) throw SchemaError(pp + "/delta", "delta must be positive");
        }
        if (!sc.perturbation.t && sc.perturbation.delta == 0)
            throw SchemaError(pp, "either t or delta is required");
        if (const json* r = optional_field(*p, "r")) sc.perturbation.r = read_q(*r, pp + "/r");
        if (const json* s = optional_field(*p, "s")) sc.perturbation.s = read_q(*s, pp + "/s");
    }
    if (const json* c = optional_field(doc, "count")) {
        sc.count = static_cast<int>(read_int(*c, "/count"));
        if (sc.count < 1) throw SchemaError("/count", "count must be positive");
    }

    // per-kind requirements
    switch (sc.kind) {
    case ScenarioKind::FloerCompare:
    case ScenarioKind::QuiltReport: {
        if (sc.curves.size() != 2) throw SchemaError("/curves", "exactly two curves required");
        if (!sc.correspondence) {
            if (sc.kind == ScenarioKind::QuiltReport) throw SchemaError("/correspondence", "required field missing");
            if (!(sc.curves[0].surface == sc.curves[1].surface))
                throw SchemaError("/curves/1/surface", "both curves must lie on one surface");
            break;
        }
        if (!(sc.curves[0].surface == sc.correspondence->leg1.target()))
            throw SchemaError("/curves/0/surface", "first curve must lie on the target of leg1");
        if (!(sc.curves[1].surface == sc.correspondence->leg2.target()))
            throw SchemaError("/curves/1/surface", "second curve must lie on the target of leg2");
        break;
    }
    case ScenarioKind::SingularAnalyze:
        if (!sc.map) throw SchemaError("/map", "required field missing");
        break;
    case ScenarioKind::Perturb:
        if (!sc.extension) throw SchemaError("/extension", "required field missing");
        if (!optional_field(doc, "perturbation")) throw SchemaError("/perturbation", "required field missing");
        break;
    case ScenarioKind::Selftest:
        if (!sc.seed) throw SchemaError("/seed", "required field missing");
        break;
    }
    return sc;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_safe(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
    return s;
}

std::ofstream open_out(const RunOptions& opt, const std::string& file)
{
    std::filesystem::path p = std::filesystem::path(opt.out_dir) / file;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("OutputError", "cannot write " + p.string());
    return out;
}

void write_bigons(std::ostream& out, const std::string& label, const FloerComplex& c, const std::vector<int>& flagged)
{
    for (std::size_t i = 0; i < c.bigons.size(); ++i) {
        const Bigon& b = c.bigons[i];
        bool f = std::find(flagged.begin(), flagged.end(), static_cast<int>(i)) != flagged.end();
        out << label << ',' << i << ',' << b.from << ',' << b.to << ',' << b.curve1 << ',' << b.curve2 << ','
            << b.polygon.size() << ',' << (f ? 1 : 0) << '\n';
    }
}

void write_complex(const RunOptions& opt, const std::string& stem, const FloerComplex& c)
{
    auto csv = open_out(opt, stem + ".csv");
    write_csv(c, csv);
    if (opt.svg) {
        auto svg = open_out(opt, stem + ".svg");
        write_svg(c, svg);
    }
}

int run_plain_floer(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    FloerComplex c = differential(sc.curves[0], sc.curves[1]);
    bool d2 = squares_to_zero(c);
    write_complex(opt, "complex", c);
    auto out = open_out(opt, "report.csv");
    out << "key,value\n"
        << "scenario," << csv_safe(sc.name) << '\n'
        << "kind,floer-compare\n"
        << "mode,single\n"
        << "generators," << c.size() << '\n'
        << "bigons," << c.bigons.size() << '\n'
        << "verdict," << (d2 ? "d2-zero" : "d2-nonzero") << '\n';
    out << "\ncomplex,bigon,from,to,curve1,curve2,polygon_vertices,flagged\n";
    write_bigons(out, "single", c, {});
    log << "generators " << c.size() << ", bigons " << c.bigons.size() << ", d^2 " << (d2 ? "= 0" : "!= 0") << '\n';
    return d2 ? 0 : 2;
}

int run_floer_compare(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    if (!sc.correspondence) return run_plain_floer(sc, opt, log);
    const Correspondence& corr = *sc.correspondence;
    bool covering = corr.is_covering();
    ComparisonReport r = covering ? compare_complexes(sc.curves[0], corr, sc.curves[1])
                                  : conjecture_report(sc.curves[0], corr, sc.curves[1], sc.tau);
    write_complex(opt, "left", r.left);
    write_complex(opt, "right", r.right);
    if (covering) write_complex(opt, "lifted", r.lifted);

    std::string verdict = !r.bijection.valid ? "no-bijection" : r.agree ? "agree" : "disagree";
    auto out = open_out(opt, "report.csv");
    auto list = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
        return s;
    };
    out << "key,value\n"
        << "scenario," << csv_safe(sc.name) << '\n'
        << "kind,floer-compare\n"
        << "mode," << (covering ? "covering" : "fold") << '\n'
        << "exact," << (r.exact ? 1 : 0) << '\n'
        << "tolerance," << (covering ? std::string("0") : to_string(sc.tau)) << '\n'
        << "triples," << r.bijection.quilt.triples.size() << '\n'
        << "generators_left," << r.left.size() << '\n'
        << "generators_right," << r.right.size() << '\n';
    if (covering) out << "generators_lifted," << r.lifted.size() << '\n';
    out << "bigons_left," << r.left.bigons.size() << '\n' << "bigons_right," << r.right.bigons.size() << '\n';
    if (covering) out << "bigons_lifted," << r.lifted.bigons.size() << '\n';
    out << "flagged_left," << list(r.flagged_left) << '\n'
        << "flagged_right," << list(r.flagged_right) << '\n'
        << "restricted," << (r.restricted ? 1 : 0) << '\n'
        << "disagreements," << r.disagreements.size() << '\n'
        << "verdict," << verdict << '\n';
    if (!r.bijection.valid) out << "problem," << csv_safe(r.bijection.problem) << '\n';
    out << "\nrow,col,left,right" << (covering ? ",lifted" : "") << ",flagged\n";
    for (const auto& e : r.entries) {
        out << e.row << ',' << e.col << ',' << int(e.left) << ',' << int(e.right);
        if (covering) out << ',' << int(e.lifted);
        out << ',' << (e.flagged ? 1 : 0) << '\n';
    }
    out << "\ncomplex,bigon,from,to,curve1,curve2,polygon_vertices,flagged\n";
    write_bigons(out, "left", r.left, r.flagged_left);
    write_bigons(out, "right", r.right, r.flagged_right);
    if (covering) write_bigons(out, "lifted", r.lifted, {});

    log << "triples " << r.bijection.quilt.triples.size() << ", bigons " << r.left.bigons.size() << '/'
        << r.right.bigons.size() << ", flagged " << r.flagged_left.size() + r.flagged_right.size() << ", verdict "
        << verdict << (r.restricted ? " (unflagged entries only)" : "") << '\n';
    return r.bijection.valid && r.agree ? 0 : 2;
}

int run_quilt_report(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    Bijection b = generator_bijection(sc.curves[0], *sc.correspondence, sc.curves[1], sc.tau);
    auto out = open_out(opt, "triples.csv");
    out << "triple,x,y,image1_x,image1_y,image2_x,image2_y,sheet,left,right\n";
    for (std::size_t k = 0; k < b.quilt.triples.size(); ++k) {
        const Triple& t = b.quilt.triples[k];
        out << k << ',' << to_string(t.x.point.x) << ',' << to_string(t.x.point.y) << ',' << to_string(t.image1.x)
            << ',' << to_string(t.image1.y) << ',' << to_string(t.image2.x) << ',' << to_string(t.image2.y) << ','
            << t.sheet << ',' << (k < b.to_left.size() ? b.to_left[k] : -1) << ','
            << (k < b.to_right.size() ? b.to_right[k] : -1) << '\n';
    }
    auto rep = open_out(opt, "report.csv");
    rep << "key,value\n"
        << "scenario," << csv_safe(sc.name) << '\n'
        << "kind,quilt-report\n"
        << "exact," << (b.exact ? 1 : 0) << '\n'
        << "triples," << b.quilt.triples.size() << '\n'
        << "generators_left," << b.left.size() << '\n'
        << "generators_right," << b.right.size() << '\n'
        << "verdict," << (b.valid ? "bijection" : "no-bijection") << '\n';
    if (!b.valid) rep << "problem," << csv_safe(b.problem) << '\n';
    log << "triples " << b.quilt.triples.size() << ", left " << b.left.size() << ", right " << b.right.size()
        << (b.valid ? ", bijection" : ", no bijection: " + b.problem) << '\n';
    return b.valid ? 0 : 2;
}

jet::Thresholds effective_thresholds(const Scenario& sc, const RunOptions& opt)
{
    jet::Thresholds th = sc.thresholds;
    if (opt.theta_reg) th.reg = *opt.theta_reg;
    if (opt.theta_cusp) th.cusp = *opt.theta_cusp;
    if (opt.theta_ang) th.ang = *opt.theta_ang;
    return th;
}

int run_singular(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    const jet::SmoothMap2to4& m = *sc.map;
    jet::Thresholds th = effective_thresholds(sc, opt);
    int n = opt.grid.value_or(sc.grid);
    jet::JetField f = jet::analyze(m, sc.window, n, opt.threads);
    bool lagrangian = jet::is_lagrangian(f, th);
    auto rep = open_out(opt, "report.csv");
    rep << "key,value\n"
        << "scenario," << csv_safe(sc.name) << '\n'
        << "kind,singular-analyze\n"
        << "grid," << n << '\n'
        << "max_det_difference," << fmt(f.max_det_difference) << '\n'
        << "max_pullback," << fmt(f.max_pullback) << '\n'
        << "lagrangian," << (lagrangian ? 1 : 0) << '\n';
    bool ok = true;
    std::ostringstream cusps;
    for (int leg : sc.legs) {
        jet::SingularLocus locus = jet::extract_singular_locus(f, m, leg);
        jet::TransversalityReport tr = jet::check_transversality(f, locus, th);
        std::string L = "leg" + std::to_string(leg);
        rep << L << "_vertices," << locus.vertex_count() << '\n'
            << L << "_min_gradient," << fmt(locus.vertex_count() ? tr.min_gradient : 0) << '\n'
            << L << "_transverse," << (tr.transverse ? 1 : 0) << '\n';
        if (locus.vertex_count() == 0) {
            rep << L << "_fold,0\n" << L << "_cusp,0\n";
            log << L << ": empty singular locus\n";
            continue;
        }
        if (!tr.transverse) {
            ok = false;
            log << L << ": not transverse (min |grad det| " << fmt(tr.min_gradient) << ")\n";
            auto out = open_out(opt, "locus_" + L + ".csv");
            jet::write_locus_csv(locus, out);
            continue;
        }
        locus = jet::classify_singular_points(f, m, std::move(locus), th);
        rep << L << "_fold," << locus.count(jet::PointTag::Fold) << '\n'
            << L << "_cusp," << locus.count(jet::PointTag::CuspCandidate) << '\n';
        for (const auto& c : locus.cusps)
            cusps << L << ',' << fmt(c.x[0]) << ',' << fmt(c.x[1]) << ',' << fmt(c.sin_angle) << ',' << fmt(c.score)
                  << ',' << fmt(c.score_derivative) << ',' << (c.s11_transverse ? 1 : 0) << '\n';
        auto out = open_out(opt, "locus_" + L + ".csv");
        jet::write_locus_csv(locus, out);
        if (opt.svg) {
            auto svg = open_out(opt, "locus_" + L + ".svg");
            jet::write_locus_svg(f, locus, svg);
        }
        log << L << ": " << locus.vertex_count() << " locus vertices, " << locus.count(jet::PointTag::CuspCandidate)
            << " cusp candidates\n";
    }
    rep << "verdict," << (ok ? "transverse" : "not-transverse") << '\n';
    rep << "\nleg,cusp_x1,cusp_x2,sin_angle,score,score_derivative,s11_transverse\n" << cusps.str();
    return ok ? 0 : 2;
}

int run_perturb(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    const jet::SmoothMap4to4& G = *sc.extension;
    const PerturbRequest& req = sc.perturbation;
    jet::Thresholds th = effective_thresholds(sc, opt);
    int n = opt.grid.value_or(sc.grid);

    auto build = [&](const Q& t) {
        jet::PerturbationSpec spec;
        if (req.kind == jet::PerturbKind::FirstType) {
            spec = jet::first_type_from_jacobian(G, t);
            if (req.r) spec.r = *req.r;
            if (req.s) spec.s = *req.s;
        }
        else {
            spec.kind = jet::PerturbKind::SecondType;
            spec.t = t;
        }
        return std::make_pair(spec, jet::perturb(G, spec));
    };
    // the perturbed map must cut its singular locus out transversely on every
    // requested leg
    auto acceptable = [&](const jet::SmoothMap2to4& g) {
        jet::JetField f = jet::analyze(g, sc.window, n, opt.threads);
        for (int leg : sc.legs) {
            jet::SingularLocus l = jet::extract_singular_locus(f, g, leg);
            if (!jet::check_transversality(f, l, th).transverse) return false;
        }
        return true;
    };

    Q t;
    int draws = 0;
    bool accepted = true;
    if (req.t) {
        t = *req.t;
        accepted = acceptable(build(t).second);
    }
    else {
        if (!opt.seed && !sc.seed) throw SchemaError("/seed", "a seed is required to draw the parameter");
        std::uint64_t seed = opt.seed ? *opt.seed : *sc.seed;
        try {
            // draws are rounded to rationals so the perturbation stays exact
            auto to_q = [](double x) { return rationalize(x, 1000000000L); };
            auto [v, k] = jet::select_parameter(seed, req.delta, [&](double x) { return acceptable(build(to_q(x)).second); });
            t = to_q(v);
            draws = k;
        }
        catch (const Error& e) {
            if (e.kind() != "NoParameter") throw;
            accepted = false;
            draws = 100;
        }
    }
    auto [spec, g] = build(t);
    jet::Jet j = jet::evaluate_jet(g, 0, 0);

    // central differences in t of the Jacobian determinants at the origin
    const double h = 1e-5;
    Q hq(1, 100000);
    jet::Jet jp = jet::evaluate_jet(build(t + hq).second, 0, 0);
    jet::Jet jm = jet::evaluate_jet(build(t - hq).second, 0, 0);

    auto rep = open_out(opt, "report.csv");
    rep << "key,value\n"
        << "scenario," << csv_safe(sc.name) << '\n'
        << "kind,perturb\n"
        << "type," << (req.kind == jet::PerturbKind::FirstType ? "first" : "second") << '\n'
        << "t," << to_string(t) << '\n'
        << "draws," << draws << '\n';
    if (req.kind == jet::PerturbKind::FirstType) rep << "r," << to_string(spec.r) << '\n' << "s," << to_string(spec.s) << '\n';
    for (int i = 0; i < 4; ++i) rep << 'g' << i + 1 << ',' << csv_safe(expr::print(g.g[i])) << '\n';
    rep << "det1_origin," << fmt(j.det(1)) << '\n'
        << "det2_origin," << fmt(j.det(2)) << '\n'
        << "ddt_det1_origin," << fmt((jp.det(1) - jm.det(1)) / (2 * h)) << '\n'
        << "ddt_det2_origin," << fmt((jp.det(2) - jm.det(2)) / (2 * h)) << '\n';
    if (req.kind == jet::PerturbKind::SecondType) {
        int var = 1;  // g is a function of (x1, x3); x3 is slot 1
        rep << "d2_y1_dx3dx3_origin," << fmt(j.hess[0][var][var]) << '\n'
            << "d2_y2_dx3dx3_origin," << fmt(j.hess[1][var][var]) << '\n';
    }
    rep << "verdict," << (accepted ? "accepted" : "rejected") << '\n';
    log << "t = " << to_string(t) << " after " << draws << " draws, " << (accepted ? "accepted" : "rejected") << '\n';
    return accepted ? 0 : 2;
}

int run_selftest(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    std::uint64_t seed = opt.seed ? *opt.seed : *sc.seed;
    std::mt19937_64 rng(seed);
    auto out = open_out(opt, "selftest.csv");
    out << "instance,degree1,degree2,triples,generators_left,generators_right,bijection,agree,d2_left,d2_right\n";
    bool all = true;
    for (int i = 0; i < sc.count; ++i) {
        CoveringInstance inst = random_covering_instance(rng);
        ComparisonReport r = compare_complexes(inst.l1, inst.corr, inst.l2);
        bool d2l = squares_to_zero(r.left), d2r = squares_to_zero(r.right);
        bool pass = r.bijection.valid && r.agree && d2l && d2r;
        all = all && pass;
        out << i << ',' << inst.corr.leg1.covering.degree << ',' << inst.corr.leg2.covering.degree << ','
            << r.bijection.quilt.triples.size() << ',' << r.left.size() << ',' << r.right.size() << ','
            << (r.bijection.valid ? 1 : 0) << ',' << (r.agree ? 1 : 0) << ',' << (d2l ? 1 : 0) << ','
            << (d2r ? 1 : 0) << '\n';
    }
    out << "\nverdict," << (all ? "pass" : "fail") << '\n';
    log << sc.count << " random covering instances, " << (all ? "all pass" : "FAILURES") << '\n';
    return all ? 0 : 2;
}

Q random_q(std::mt19937_64& rng, long lo, long hi, long den)
{
    std::uniform_int_distribution<long> d(lo, hi);
    Q q(d(rng), den);
    q.canonicalize();
    return q;
}

std::array<std::array<long, 2>, 2> random_integer_matrix(std::mt19937_64& rng, long max_det)
{
    std::uniform_int_distribution<long> e(-2, 2);
    for (;;) {
        std::array<std::array<long, 2>, 2> m{{{e(rng), e(rng)}, {e(rng), e(rng)}}};
        long d = std::labs(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        if (d >= 1 && d <= max_det) return m;
    }
}

} // namespace

Scenario parse_scenario(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return from_json(doc);
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("InputError", "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario sc = parse_scenario(ss.str());
    if (sc.name.empty()) sc.name = std::filesystem::path(path).stem().string();
    return sc;
}

int run_scenario(const Scenario& sc, const RunOptions& opt, std::ostream& log)
{
    std::filesystem::create_directories(opt.out_dir);
    switch (sc.kind) {
    case ScenarioKind::FloerCompare: return run_floer_compare(sc, opt, log);
    case ScenarioKind::QuiltReport: return run_quilt_report(sc, opt, log);
    case ScenarioKind::SingularAnalyze: return run_singular(sc, opt, log);
    case ScenarioKind::Perturb: return run_perturb(sc, opt, log);
    case ScenarioKind::Selftest: return run_selftest(sc, opt, log);
    }
    return 1;
}

FlatSurface random_torus(std::mt19937_64& rng)
{
    // near-rectangular bases keep random curves short
    Q a = random_q(rng, 4, 8, 5), b = random_q(rng, -2, 2, 7);
    Q c = random_q(rng, -2, 2, 7), d = random_q(rng, 4, 8, 5);
    return make_torus({a, b}, {c, d});
}

PLCurve random_curve(const FlatSurface& surface, std::mt19937_64& rng, int max_vertices)
{
    std::uniform_int_distribution<int> nv(1, std::max(1, max_vertices));
    std::uniform_int_distribution<int> coef(-1, 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int p = coef(rng), q = coef(rng);
        if (p == 0 && q == 0) continue;
        Vec2 hol = surface.from_lattice(Q(p), Q(q));
        int k = nv(rng);
        Vec2 start = surface.from_lattice(random_q(rng, 0, 96, 97), random_q(rng, 0, 96, 97));
        std::vector<Vec2> vs;
        for (int i = 0; i < k; ++i) {
            Vec2 base = start + hol * (Q(i) / k);
            Vec2 wiggle{random_q(rng, -40, 40, 101), random_q(rng, -40, 40, 103)};
            vs.push_back(base + wiggle);
        }
        try {
            PLCurve c = make_curve(surface, vs, hol);
            if (embedded_lift_check(c)) return c;
        }
        catch (const Error&) {
        }
    }
    throw Error("NoCurve", "no admissible random curve found");
}

Correspondence random_covering_correspondence(std::mt19937_64& rng, long max_degree)
{
    FlatSurface f1 = random_torus(rng);
    auto P = random_integer_matrix(rng, max_degree);
    Vec2 fb1 = f1.b1 * Q(P[0][0]) + f1.b2 * Q(P[1][0]);
    Vec2 fb2 = f1.b1 * Q(P[0][1]) + f1.b2 * Q(P[1][1]);
    FlatSurface f = make_torus(fb1, fb2);
    // F2 has basis B_F Q^-1, so B_F = B_2 Q
    auto M = random_integer_matrix(rng, max_degree);
    Q det(M[0][0] * M[1][1] - M[0][1] * M[1][0]);
    Q i00 = Q(M[1][1]) / det, i01 = Q(-M[0][1]) / det, i10 = Q(-M[1][0]) / det, i11 = Q(M[0][0]) / det;
    Vec2 b1 = fb1 * i00 + fb2 * i10;
    Vec2 b2 = fb1 * i01 + fb2 * i11;
    FlatSurface f2 = make_torus(b1, b2);
    return make_correspondence(covering_leg(covering_from_sublattice(f, f1)),
                               covering_leg(covering_from_sublattice(f, f2)));
}

CoveringInstance random_covering_instance(std::mt19937_64& rng, int max_vertices)
{
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Correspondence corr = random_covering_correspondence(rng);
        PLCurve l1 = random_curve(corr.leg1.target(), rng, max_vertices);
        PLCurve l2 = random_curve(corr.leg2.target(), rng, max_vertices);
        // retry until every composed problem is transverse and admissible
        try {
            compare_complexes(l1, corr, l2);
        }
        catch (const Error&) {
            continue;
        }
        return {corr, l1, l2};
    }
    throw Error("NoInstance", "no admissible random covering instance found");
}

} // namespace lagcorr
