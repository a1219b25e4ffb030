#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshfill/engine.hpp"
#include "meshfill/topology.hpp"

namespace meshfill {

/// Upload budget as a multiple of the payload; empty = unlimited.
using Budget = std::optional<double>;

std::string budget_label(const Budget& b);
/// "unlimited" or a positive number. Throws ConfigError("budgets", ...).
Budget parse_budget(std::string_view text);

/// The grid of experiment cells and how to replicate them.
struct ExperimentSpec {
    std::vector<TopologyKind> kinds{TopologyKind::line, TopologyKind::triangle, TopologyKind::random};
    std::vector<int> part_counts{1, 2, 4, 8, 16, 32};
    std::vector<Heuristic> heuristics{Heuristic::best_client(), Heuristic::greedy_global(),
                                      Heuristic::hybrid(0.9), Heuristic::hybrid(0.8), Heuristic::hybrid(0.7)};
    std::vector<Policy> policies{Policy::less_of_part, Policy::more_of_part, Policy::less_total,
                                 Policy::more_total};
    std::vector<Budget> budgets{std::nullopt, 5.0, 2.0, 1.2};
    int replications = 100;
    Seed master_seed = 1;
    std::string output_dir = "out";

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Everything a config file can set. `sim`, `topology` and `nodes` describe
/// a single run; `experiment` the table grid. Tables reuse `sim` and `nodes`
/// for everything a cell does not vary.
struct Config {
    ExperimentSpec experiment;
    SimConfig sim;
    TopologyKind topology = TopologyKind::line;
    int nodes = 100;
};

/// Line-oriented `key = value` with `#` comments and optional `[simulation]`
/// / `[experiment]` / `[bandwidth]` sections. Keys before any section header
/// belong to [simulation]. Throws ConfigError naming the key, or "line N"
/// for syntax errors.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Fill-time statistics in slots over replicated runs.
struct SummaryStats {
    double mean = 0.0;  // NaN when every run was truncated
    double std = 0.0;   // sample deviation; 0 for a single completed run
    int count = 0;      // runs, including truncated ones
    int truncated = 0;

    bool all_truncated() const { return truncated == count; }
};

/// Truncated runs (empty entries) are counted but excluded from mean/std.
/// Throws DomainError on an empty list.
SummaryStats summarize(std::span<const std::optional<int>> fill_slots);

/// "812(2)", ">3000" when every run was truncated, and a "[k>3000]" suffix
/// when only some were.
std::string format_cell(const SummaryStats& s, int max_slots);

/// One experiment cell; the rest of the run parameters come from a base
/// SimConfig.
struct Cell {
    TopologyKind kind = TopologyKind::line;
    int parts = 1;
    Heuristic heuristic;
    Policy policy = Policy::more_of_part;
    Budget budget;
};

/// Run r uses seed derive_seed(master_seed, r) for the engine and
/// derive_seed(that, 0) for the topology, so every cell sees the same
/// sequence of topologies.
Seed run_seed(Seed master_seed, int run);
Seed topology_seed(Seed run_seed);
SimConfig cell_config(const SimConfig& base, const Cell& cell, Seed seed);

struct CellResult {
    SummaryStats stats;
    std::vector<std::optional<int>> fill_slots;  // by run index
    std::vector<Trajectory> trajectories;        // filled only when requested
};

/// Replications are spread over `jobs` threads; results are stored by run
/// index, so the outcome does not depend on scheduling.
CellResult run_cell(const Cell& cell, const SimConfig& base, int nodes, int replications, Seed master_seed,
                    int jobs = 1, bool keep_trajectories = false);

/// One rendered table: row labels, column labels, and a cell per slot.
struct Table {
    int which = 1;
    std::vector<std::string> columns;
    struct Row {
        TopologyKind kind;
        int parts;
        std::vector<std::optional<SummaryStats>> cells;  // empty = n/a
    };
    std::vector<Row> rows;
    int max_slots = 3000;
};

/// Builds table 1 (heuristics), 2 (policies) or 3 (budgets). Columns are
/// fixed; a column whose value the experiment does not include is reported n/a.
/// Tables 1 and 3 use base.policy; table 2 uses Best-Client.
Table build_table(int which, const ExperimentSpec& spec, const SimConfig& base, int nodes, int jobs = 1);

void write_table_text(std::ostream& out, const Table& t);
/// topology,parts,column,mean,std,count,truncated with unrounded values.
void write_table_csv(std::ostream& out, const Table& t);

/// slot,filled,system_bw_bytes_per_s
void write_trajectory_csv(std::ostream& out, const Trajectory& t);

/// Pointwise mean over runs. Shorter runs are padded with their final filled
/// count and zero bandwidth.
struct Curves {
    std::vector<double> filled_mean;
    std::vector<double> bw_mean;
};
Curves average_curves(std::span<const Trajectory> runs);
/// slot,filled_mean,bw_mean
void write_curves_csv(std::ostream& out, const Curves& c);

}  // namespace meshfill
