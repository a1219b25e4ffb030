#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshfill/bwmodel.hpp"
#include "meshfill/heuristics.hpp"
#include "meshfill/rng.hpp"
#include "meshfill/topology.hpp"

namespace meshfill {

enum class HeuristicKind { best_client, greedy_global, hybrid };

struct Heuristic {
    HeuristicKind kind = HeuristicKind::best_client;
    double threshold = 0.0;  // hybrid only

    static Heuristic best_client() { return {HeuristicKind::best_client, 0.0}; }
    static Heuristic greedy_global() { return {HeuristicKind::greedy_global, 0.0}; }
    static Heuristic hybrid(double threshold) { return {HeuristicKind::hybrid, threshold}; }

    /// "best_client", "greedy_global" or "hybrid:0.8".
    std::string label() const;
    /// Inverse of label(). Throws ConfigError("heuristic", ...).
    static Heuristic parse(std::string_view text);

    friend bool operator==(const Heuristic&, const Heuristic&) = default;
};

/// One simulation run. Sizes are bytes, rates bytes/second, 1 GB = 1e9 B.
struct SimConfig {
    std::int64_t payload_bytes = 5'000'000'000;
    int parts = 1;
    double slot_seconds = 60.0;
    int max_slots = 3000;
    double node_up_cap = 1.5e6;
    double node_down_cap = 1.5e6;
    std::optional<double> upload_budget_factor;  // multiple of payload; empty = unlimited
    Heuristic heuristic;
    Policy policy = Policy::more_of_part;
    std::optional<NodeId> root;  // empty = drawn from seed
    Seed seed = 1;
    BandwidthParams bandwidth;

    std::int64_t part_bytes() const { return payload_bytes / parts; }

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct NodeState {
    std::vector<std::int64_t> part_bytes;
    std::int64_t uploaded_bytes = 0;
    bool is_root = false;

    bool serves(int part, std::int64_t part_size) const {
        return is_root || part_bytes[static_cast<std::size_t>(part)] >= part_size;
    }
    bool complete(std::int64_t part_size) const;
    std::int64_t total_bytes() const;

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct Connection {
    NodeId server;
    NodeId client;
    int part;
    double rate;  // bytes/second for the whole slot

    friend bool operator==(const Connection&, const Connection&) = default;
};

/// Per-slot record. Index k holds the state after k slots; system_bw[0] = 0.
struct Trajectory {
    std::vector<int> filled_count;
    std::vector<double> system_bw;
    std::optional<int> fill_slot;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Rates below this are treated as zero when planning.
inline constexpr double kMinRate = 1.0;

/// Everything fixed for the lifetime of one run.
struct RunContext {
    const Topology* topology = nullptr;
    LinkTable links;
    SimConfig cfg;
    NodeId root = 0;
    Seed noise_seed = 0;
    std::vector<NodeId> gg_admission;  // greedy placement order, root excluded
    std::size_t gg_prefix = 0;         // nodes admitted in greedy order before switching

    /// Derives links, root, noise stream and greedy order from cfg.seed.
    static RunContext make(const Topology& t, const SimConfig& cfg);

    /// True when part admission follows the greedy order (vs Best-Client).
    bool greedy_for_part(std::span<const NodeState> states, int part) const;
};

/// Initial states: root holds everything, every other node nothing.
std::vector<NodeState> initial_states(const RunContext& ctx);

/// Connections for one slot from start-of-slot states. The admission loop:
/// rarest-first part choice, client by Best-Client or greedy order, and
/// multi-source service in decreasing link-bandwidth order under the
/// server, budget, client and per-link caps.
std::vector<Connection> plan_slot(const RunContext& ctx, std::span<const NodeState> states, int slot);

/// Transfers rate * slot_seconds bytes per connection, clipped at part size.
/// Returns bytes actually counted.
std::int64_t apply_slot(std::span<NodeState> states, std::span<const Connection> plan, const SimConfig& cfg);

int filled_count(std::span<const NodeState> states, std::int64_t part_size);

/// Stepwise driver; run_to_fill() is the usual entry point.
class Simulation {
public:
    Simulation(const Topology& t, const SimConfig& cfg);

    const RunContext& context() const { return ctx_; }
    const std::vector<NodeState>& states() const { return states_; }
    const Trajectory& trajectory() const { return trajectory_; }
    int slot() const { return slot_; }
    bool finished() const;

    /// Plans and applies one slot; returns the plan that was applied.
    std::vector<Connection> step();

private:
    RunContext ctx_;
    std::vector<NodeState> states_;
    Trajectory trajectory_;
    int slot_ = 0;
};

Trajectory run_to_fill(const Topology& t, const SimConfig& cfg);

}  // namespace meshfill
