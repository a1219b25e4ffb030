// meshfill command line: topology generation, single runs, tables and curves.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "meshfill/engine.hpp"
#include "meshfill/error.hpp"
#include "meshfill/harness.hpp"
#include "meshfill/topology.hpp"

namespace fs = std::filesystem;
using namespace meshfill;

namespace {

struct CommonOpts {
    std::string config;
    std::optional<Seed> seed;
    std::optional<int> reps;
    std::optional<std::string> out;
    int jobs = 1;
};

struct CellOpts {
    std::optional<std::string> kind;
    std::optional<int> nodes;
    std::optional<int> parts;
    std::optional<std::string> heuristic;
    std::optional<std::string> policy;
    std::optional<std::string> budget;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--config", o.config, "config file (key = value)");
    app->add_option("--seed", o.seed, "seed (master seed for tables and curves)");
    app->add_option("--reps", o.reps, "replications per cell");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--jobs", o.jobs, "parallel replications")->check(CLI::PositiveNumber);
}

void add_cell(CLI::App* app, CellOpts& o) {
    app->add_option("--kind", o.kind, "line, triangle or random");
    app->add_option("--nodes", o.nodes, "node count");
    app->add_option("--parts", o.parts, "part count");
    app->add_option("--heuristic", o.heuristic, "best_client, greedy_global or hybrid:<threshold>");
    app->add_option("--policy", o.policy, "tie-break policy 1-4");
    app->add_option("--budget", o.budget, "upload budget factor or 'unlimited'");
}

Config load(const CommonOpts& c, const CellOpts& cell) {
    Config cfg = c.config.empty() ? parse_config("") : load_config(c.config);
    if (c.reps) {
        if (*c.reps < 1) throw ConfigError("reps", "must be at least 1");
        cfg.experiment.replications = *c.reps;
    }
    if (c.out) cfg.experiment.output_dir = *c.out;
    if (cell.kind) cfg.topology = topology_kind_from_string(*cell.kind);
    if (cell.nodes) cfg.nodes = *cell.nodes;
    if (cell.parts) cfg.sim.parts = *cell.parts;
    if (cell.heuristic) cfg.sim.heuristic = Heuristic::parse(*cell.heuristic);
    if (cell.policy) cfg.sim.policy = policy_from_string(*cell.policy);
    if (cell.budget) cfg.sim.upload_budget_factor = parse_budget(*cell.budget);
    cfg.sim.validate();
    if (cfg.nodes < 2) throw ConfigError("nodes", "must be at least 2");
    return cfg;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
}

int gen_topology(const CommonOpts& c, const CellOpts& cell) {
    Config cfg = load(c, cell);
    const Seed seed = c.seed.value_or(cfg.sim.seed);
    const Topology t = generate_topology(cfg.topology, cfg.nodes, topology_seed(seed));
    if (c.out) {
        auto f = open_out(*c.out, "topology.txt");
        write_topology(f, t);
        std::cout << "wrote " << (fs::path(*c.out) / "topology.txt").string() << '\n';
    } else {
        write_topology(std::cout, t);
    }
    return 0;
}

int run(const CommonOpts& c, const CellOpts& cell) {
    Config cfg = load(c, cell);
    if (c.seed) cfg.sim.seed = *c.seed;
    const Topology t = generate_topology(cfg.topology, cfg.nodes, topology_seed(cfg.sim.seed));
    const Trajectory traj = run_to_fill(t, cfg.sim);
    std::cout << to_string(cfg.topology) << " n=" << cfg.nodes << " parts=" << cfg.sim.parts << ' '
              << cfg.sim.heuristic.label() << " policy=" << policy_number(cfg.sim.policy)
              << " budget=" << budget_label(cfg.sim.upload_budget_factor) << " seed=" << cfg.sim.seed << ": ";
    if (traj.fill_slot)
        std::cout << "filled after " << *traj.fill_slot << " slots\n";
    else
        std::cout << "not filled within " << cfg.sim.max_slots << " slots\n";
    if (c.out) {
        auto f = open_out(*c.out, "trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    return 0;
}

int table(const CommonOpts& c, int which) {
    Config cfg = load(c, {});
    if (c.seed) cfg.experiment.master_seed = *c.seed;
    const Table t = build_table(which, cfg.experiment, cfg.sim, cfg.nodes, c.jobs);
    write_table_text(std::cout, t);
    const fs::path dir = cfg.experiment.output_dir;
    const std::string stem = "table" + std::to_string(which);
    {
        auto f = open_out(dir, stem + ".txt");
        write_table_text(f, t);
    }
    auto f = open_out(dir, stem + ".csv");
    write_table_csv(f, t);
    return 0;
}

int curves(const CommonOpts& c, const CellOpts& opts) {
    Config cfg = load(c, opts);
    if (c.seed) cfg.experiment.master_seed = *c.seed;
    Cell cell;
    cell.kind = cfg.topology;
    cell.parts = cfg.sim.parts;
    cell.heuristic = cfg.sim.heuristic;
    cell.policy = cfg.sim.policy;
    cell.budget = cfg.sim.upload_budget_factor;
    const CellResult r = run_cell(cell, cfg.sim, cfg.nodes, cfg.experiment.replications, cfg.experiment.master_seed,
                                  c.jobs, true);
    const std::string name = "curves_" + std::string(to_string(cell.kind)) + "_p" + std::to_string(cell.parts) + ".csv";
    auto f = open_out(cfg.experiment.output_dir, name);
    write_curves_csv(f, average_curves(r.trajectories));
    std::cout << "fill " << format_cell(r.stats, cfg.sim.max_slots) << " over " << r.stats.count << " runs; wrote "
              << (fs::path(cfg.experiment.output_dir) / name).string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replica mesh fill-time simulator"};
    app.require_subcommand(1);

    CommonOpts gen_c, run_c, table_c, curves_c;
    CellOpts gen_cell, run_cell_opts, curves_cell;
    int which = 1;

    auto* gen = app.add_subcommand("gen-topology", "write a hop-count topology");
    add_common(gen, gen_c);
    add_cell(gen, gen_cell);
    auto* runc = app.add_subcommand("run", "simulate one run and write its trajectory");
    add_common(runc, run_c);
    add_cell(runc, run_cell_opts);
    auto* tab = app.add_subcommand("table", "reproduce a results table");
    add_common(tab, table_c);
    tab->add_option("--which", which, "table number")->required()->check(CLI::IsMember({1, 2, 3}));
    auto* cur = app.add_subcommand("curves", "mean fill and bandwidth curves for one cell");
    add_common(cur, curves_c);
    add_cell(cur, curves_cell);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) return gen_topology(gen_c, gen_cell);
        if (*runc) return run(run_c, run_cell_opts);
        if (*tab) return table(table_c, which);
        if (*cur) return curves(curves_c, curves_cell);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
