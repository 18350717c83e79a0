// lagcorr: run a scenario file and write its CSV (and SVG) artifacts.
//
// Exit status: 0 verdict positive, 2 verdict negative, 1 input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lagcorr/scenario.hpp"

namespace {

struct Flags {
    std::string scenario;
    lagcorr::RunOptions run;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<double> theta_reg, theta_cusp, theta_ang;
    bool no_svg = false;
    int count = 5;
};

void add_flags(CLI::App* sub, Flags& f, bool scenario_required)
{
    auto* s = sub->add_option("--scenario", f.scenario, "scenario JSON file");
    if (scenario_required) s->required();
    sub->add_option("--out", f.run.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", f.seed, "seed for randomized steps");
    sub->add_option("--grid", f.grid, "grid samples per side")->check(CLI::Range(16, 100000));
    sub->add_option("--theta-reg", f.theta_reg, "regularity threshold, times the window scale")->check(CLI::PositiveNumber);
    sub->add_option("--theta-cusp", f.theta_cusp, "cusp score threshold, times the second derivative scale")
        ->check(CLI::PositiveNumber);
    sub->add_option("--theta-ang", f.theta_ang, "kernel/tangent angle threshold")->check(CLI::PositiveNumber);
    sub->add_flag("--no-svg", f.no_svg, "skip SVG figures");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lagrangian correspondences on flat surfaces: Floer complexes and singular loci"};
    app.require_subcommand(1);
    Flags flags;
    struct Sub {
        const char* name;
        const char* help;
        lagcorr::ScenarioKind kind;
    };
    const Sub subs[] = {
        {"floer-compare", "compare the Floer complexes of a composed pair", lagcorr::ScenarioKind::FloerCompare},
        {"quilt-report", "list quilted generators and the generator bijection", lagcorr::ScenarioKind::QuiltReport},
        {"singular-analyze", "extract and classify the singular locus of a map", lagcorr::ScenarioKind::SingularAnalyze},
        {"perturb", "perturb a map through a given extension", lagcorr::ScenarioKind::Perturb},
        {"selftest", "randomized covering checks", lagcorr::ScenarioKind::Selftest},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        bool selftest = s.kind == lagcorr::ScenarioKind::Selftest;
        add_flags(sub, flags, !selftest);
        if (selftest) sub->add_option("--count", flags.count, "number of random instances")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const Sub* chosen = nullptr;
    for (const auto& s : subs)
        if (app.got_subcommand(s.name)) chosen = &s;

    flags.run.seed = flags.seed;
    flags.run.grid = flags.grid;
    flags.run.theta_reg = flags.theta_reg;
    flags.run.theta_cusp = flags.theta_cusp;
    flags.run.theta_ang = flags.theta_ang;
    flags.run.svg = !flags.no_svg;

    try {
        lagcorr::Scenario sc;
        if (!flags.scenario.empty()) {
            sc = lagcorr::load_scenario(flags.scenario);
            if (sc.kind != chosen->kind)
                throw lagcorr::SchemaError("/kind", "scenario is a " + lagcorr::to_string(sc.kind) + " scenario, not " +
                                                        chosen->name);
        }
        else {
            sc.kind = chosen->kind;
            sc.name = "selftest";
            sc.count = flags.count;
            if (!flags.seed) throw lagcorr::SchemaError("/seed", "selftest needs --seed or a scenario with a seed");
            sc.seed = flags.seed;
        }
        return lagcorr::run_scenario(sc, flags.run, std::cout);
    }
    catch (const lagcorr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
