// Command-line front end: run scenarios, built-in experiments, equilibrium
// solves and loop analysis, writing deterministic CSV/JSON/SVG bundles.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbm/experiments.hpp"
#include "pbm/io.hpp"
#include "pbm/loops.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string out_dir = "out";
    double dt = 0.125;
    std::string method = "euler";
    double horizon = 0.0;  // 0 = scenario default
    std::string format = "csv";
    bool dump_scenario = false;
    bool seedless = false;  // accepted for interface compatibility; runs have no RNG
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--out", opt.out_dir, "Output directory");
    cmd->add_option("--dt", opt.dt, "Integration step (months)");
    cmd->add_option("--method", opt.method, "Integration method")
        ->check(CLI::IsMember({"euler", "rk4"}));
    cmd->add_option("--horizon", opt.horizon, "Override horizon (months)");
    cmd->add_option("--format", opt.format, "Trajectory format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--dump-scenario", opt.dump_scenario,
                  "Print the effective scenario and exit");
    cmd->add_flag("--seedless", opt.seedless, "No-op; everything is deterministic");
}

pbm::IntegrationConfig make_config(const CommonOptions& opt) {
    pbm::IntegrationConfig config;
    config.dt = opt.dt;
    config.method = opt.method == "rk4" ? pbm::Method::RK4 : pbm::Method::Euler;
    return config;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pbm::SimulationError("cannot open " + path.string());
    out << contents;
}

void write_bundle(const pbm::ExperimentRun& run, const CommonOptions& opt) {
    fs::create_directories(opt.out_dir);
    fs::path base = fs::path(opt.out_dir) / run.scenario.name;
    std::ostringstream traj;
    if (opt.format == "json") {
        pbm::write_json(run.trajectory, traj);
        write_file(base.string() + ".json", traj.str());
    } else {
        pbm::write_csv(run.trajectory, traj);
        write_file(base.string() + ".csv", traj.str());
    }
    std::ostringstream signs;
    pbm::write_signs(run.scenario.name, run.signs, signs);
    write_file(base.string() + ".signs.txt", signs.str());
    std::ostringstream svg;
    pbm::write_svg(run.trajectory, svg);
    write_file(base.string() + ".svg", svg.str());
    std::ostringstream eq;
    pbm::write_equilibrium_report(run.equilibrium, eq);
    write_file(base.string() + ".equilibrium.txt", eq.str());
}

pbm::Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pbm::ConfigError("cannot open scenario file " + path);
    return pbm::parse_scenario(in);
}

int cmd_run(const std::string& file, const CommonOptions& opt) {
    pbm::Scenario sc = load_scenario(file);
    if (opt.horizon > 0.0) sc.horizon = opt.horizon;
    if (opt.dump_scenario) {
        pbm::dump_scenario(sc, std::cout);
        return 0;
    }
    auto [pre, post] = pbm::outcome_windows(sc.name);
    if (post.t1 > sc.horizon) {
        pre = {0.0, std::min(20.0, sc.horizon)};
        post = {std::max(0.0, sc.horizon - 20.0), sc.horizon};
    }
    pbm::ExperimentRun run = pbm::run_scenario(sc, make_config(opt), pre, post);
    write_bundle(run, opt);
    return 0;
}

int cmd_experiment(const std::string& name, bool check_table, const CommonOptions& opt) {
    std::vector<std::string> names;
    if (name == "all") {
        names = pbm::experiment_names();
    } else {
        names.push_back(name);
    }
    bool all_match = true;
    std::ostringstream summary;
    for (const auto& n : names) {
        pbm::Scenario sc = pbm::builtin_experiment(n);  // validates the name
        if (opt.horizon > 0.0) sc.horizon = opt.horizon;
        if (opt.dump_scenario) {
            pbm::dump_scenario(sc, std::cout);
            continue;
        }
        auto [pre, post] = pbm::outcome_windows(n);
        pbm::ExperimentRun run = pbm::run_scenario(sc, make_config(opt), pre, post);
        write_bundle(run, opt);
        pbm::write_signs(n, run.signs, summary);
        if (check_table && run.signs != pbm::reference_signs(n)) {
            std::cerr << "outcome signs for '" << n << "' do not match the reference row\n";
            all_match = false;
        }
    }
    if (opt.dump_scenario) return 0;
    if (name == "all") {
        fs::create_directories(opt.out_dir);
        write_file(fs::path(opt.out_dir) / "summary.signs.txt", summary.str());
    }
    return all_match ? 0 : 1;
}

int cmd_equilibrium(const std::string& file, const CommonOptions& opt) {
    pbm::Scenario sc = load_scenario(file);
    pbm::FixedPointResult fp = pbm::find_fixed_point(
        sc.initial_params, pbm::initial_guess(sc), pbm::kFixedPointTol,
        pbm::kFixedPointMaxHorizon, make_config(opt));
    pbm::write_equilibrium_report(fp, std::cout);
    return fp.converged ? 0 : 1;
}

int cmd_loops(const CommonOptions& opt) {
    pbm::SignedDigraph g = pbm::build_causal_graph();
    fs::create_directories(opt.out_dir);
    std::ostringstream edges, dot, report;
    pbm::write_edge_list(g, edges);
    pbm::write_dot(g, dot);
    pbm::write_loop_report(g, report);
    write_file(fs::path(opt.out_dir) / "graph.edges.txt", edges.str());
    write_file(fs::path(opt.out_dir) / "graph.dot", dot.str());
    write_file(fs::path(opt.out_dir) / "loops.txt", report.str());
    std::cout << report.str();
    return pbm::find_named_loops(g).all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Peasant/bandit/mafia economy simulator"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string scenario_file;
    std::string experiment_name;
    bool check_table = false;

    CLI::App* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_file, "Scenario file")->required();
    add_common(run, opt);

    CLI::App* experiment = app.add_subcommand("experiment", "Run a built-in experiment");
    experiment->add_option("name", experiment_name, "Experiment name or 'all'")->required();
    experiment->add_flag("--check-table-6.3", check_table,
                         "Fail unless all outcome signs match the reference table");
    add_common(experiment, opt);

    CLI::App* equilibrium = app.add_subcommand("equilibrium", "Solve a scenario's fixed point");
    equilibrium->add_option("scenario", scenario_file, "Scenario file")->required();
    add_common(equilibrium, opt);

    CLI::App* loops = app.add_subcommand("loops", "Analyze the causal loop structure");
    add_common(loops, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(scenario_file, opt);
        if (experiment->parsed()) return cmd_experiment(experiment_name, check_table, opt);
        if (equilibrium->parsed()) return cmd_equilibrium(scenario_file, opt);
        if (loops->parsed()) return cmd_loops(opt);
    } catch (const pbm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
