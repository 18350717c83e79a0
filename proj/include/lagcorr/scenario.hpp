#ifndef LAGCORR_SCENARIO_HPP
#define LAGCORR_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "lagcorr/correspond.hpp"
#include "lagcorr/error.hpp"
#include "lagcorr/jetlab.hpp"

namespace lagcorr {

inline constexpr int scenario_version = 1;

// A schema violation; pointer is a JSON pointer into the scenario document.
class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& what)
        : Error("SchemaError", (pointer.empty() ? std::string("/") : pointer) + ": " + what),
          pointer_(std::move(pointer))
    {
    }

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

enum class ScenarioKind { FloerCompare, QuiltReport, SingularAnalyze, Perturb, Selftest };

std::string to_string(ScenarioKind k);

struct PerturbRequest {
    jet::PerturbKind kind = jet::PerturbKind::FirstType;
    std::optional<Q> t;       // fixed parameter
    double delta = 0;         // otherwise drawn from (0, delta)
    std::optional<Q> r, s;    // FirstType coefficients, default read off dG
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::FloerCompare;
    std::string name;
    std::optional<std::uint64_t> seed;

    // flat geometry
    std::map<std::string, FlatSurface> surfaces;
    std::vector<PLCurve> curves;
    std::optional<Correspondence> correspondence;
    Q tau = default_fold_tolerance();

    // smooth maps
    std::optional<jet::SmoothMap2to4> map;
    std::vector<int> legs{1};
    jet::Window window;
    int grid = 200;
    jet::Thresholds thresholds;
    std::optional<jet::SmoothMap4to4> extension;
    PerturbRequest perturbation;

    // selftest
    int count = 5;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<double> theta_reg, theta_cusp, theta_ang;
    int threads = 0;
    bool svg = true;
};

// Writes the artifacts of one scenario. Returns 0 when the verdict is
// positive and 2 when it is negative; input errors are thrown.
int run_scenario(const Scenario& sc, const RunOptions& opt, std::ostream& log);

// Random covering instances: F1 -> F <- F2 with sublattice indices in 1..4 and
// admissible curves of at most max_vertices vertices on F1 and F2.
struct CoveringInstance {
    Correspondence corr;
    PLCurve l1, l2;
};

FlatSurface random_torus(std::mt19937_64& rng);
PLCurve random_curve(const FlatSurface& surface, std::mt19937_64& rng, int max_vertices = 8);
Correspondence random_covering_correspondence(std::mt19937_64& rng, long max_degree = 4);
CoveringInstance random_covering_instance(std::mt19937_64& rng, int max_vertices = 8);

} // namespace lagcorr

#endif
