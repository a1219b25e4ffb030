#include "meshfill/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "meshfill/error.hpp"

namespace meshfill {

std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::less_of_part: return "less_of_part";
        case Policy::more_of_part: return "more_of_part";
        case Policy::less_total: return "less_total";
        case Policy::more_total: return "more_total";
    }
    return "?";
}

int policy_number(Policy p) { return static_cast<int>(p) + 1; }

Policy policy_from_string(std::string_view name) {
    if (name == "1" || name == "less_of_part") return Policy::less_of_part;
    if (name == "2" || name == "more_of_part") return Policy::more_of_part;
    if (name == "3" || name == "less_total") return Policy::less_total;
    if (name == "4" || name == "more_total") return Policy::more_total;
    throw ConfigError("policy", "expected 1-4 or less_of_part|more_of_part|less_total|more_total, got '" +
                                    std::string(name) + "'");
}

double bc_score(NodeId candidate, std::span<const NodeId> servers, const Topology& t) {
    if (servers.empty()) throw DomainError("bc_score: empty server set");
    double score = 0.0;
    for (NodeId s : servers) score += 1.0 / static_cast<double>(t.hop(candidate, s));
    return score;
}

double round_score(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(x))));
    const double scale = std::pow(10.0, 11 - exponent);
    return std::round(x * scale) / scale;
}

std::optional<NodeId> best_client_select(const SelectionContext& ctx, const Topology& t, Policy policy) {
    if (ctx.candidates.empty()) return std::nullopt;

    const bool by_part = policy == Policy::less_of_part || policy == Policy::more_of_part;
    const bool prefer_less = policy == Policy::less_of_part || policy == Policy::less_total;

    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t k = 0; k < ctx.candidates.size(); ++k) {
        const double score = ctx.servers.empty() ? 0.0 : round_score(bc_score(ctx.candidates[k], ctx.servers, t));
        if (k == 0 || score > best_score) {
            best = k;
            best_score = score;
            continue;
        }
        if (score < best_score) continue;

        const auto& progress = by_part ? ctx.progress_part : ctx.progress_total;
        const std::int64_t mine = progress[k];
        const std::int64_t theirs = progress[best];
        if (mine != theirs) {
            if ((mine < theirs) == prefer_less) best = k;
        } else if (ctx.candidates[k] < ctx.candidates[best]) {
            best = k;
        }
    }
    return ctx.candidates[best];
}

double gg_cost(std::span<const NodeId> replicas, const Topology& t) {
    if (replicas.empty()) throw DomainError("gg_cost: empty replica set");
    std::vector<char> is_replica(static_cast<std::size_t>(t.n), 0);
    for (NodeId r : replicas) is_replica[static_cast<std::size_t>(r)] = 1;
    double cost = 0.0;
    for (NodeId i = 0; i < t.n; ++i) {
        if (is_replica[static_cast<std::size_t>(i)]) continue;
        int nearest = std::numeric_limits<int>::max();
        for (NodeId r : replicas) nearest = std::min(nearest, t.hop(i, r));
        cost += nearest;
    }
    return cost;
}

namespace {

// Incremental greedy state: nearest-replica distance per node.
struct GreedyState {
    const Topology& t;
    std::vector<char> is_replica;
    std::vector<int> nearest;

    GreedyState(const Topology& topo, std::span<const NodeId> replicas)
        : t(topo),
          is_replica(static_cast<std::size_t>(topo.n), 0),
          nearest(static_cast<std::size_t>(topo.n), std::numeric_limits<int>::max()) {
        for (NodeId r : replicas) add(r);
    }

    void add(NodeId r) {
        is_replica[static_cast<std::size_t>(r)] = 1;
        for (NodeId i = 0; i < t.n; ++i) nearest[static_cast<std::size_t>(i)] = std::min(nearest[i], t.hop(i, r));
    }

    // Cost if `r` joined; -1 when no non-replica node remains.
    long cost_with(NodeId r) const {
        long cost = 0;
        for (NodeId i = 0; i < t.n; ++i) {
            if (i == r || is_replica[static_cast<std::size_t>(i)]) continue;
            cost += std::min(nearest[static_cast<std::size_t>(i)], t.hop(i, r));
        }
        return cost;
    }

    std::pair<NodeId, long> best() const {
        NodeId best_node = -1;
        long best_cost = std::numeric_limits<long>::max();
        for (NodeId r = 0; r < t.n; ++r) {
            if (is_replica[static_cast<std::size_t>(r)]) continue;
            const long c = cost_with(r);
            if (c < best_cost) {
                best_cost = c;
                best_node = r;
            }
        }
        return {best_node, best_cost};
    }
};

}  // namespace

NodeId greedy_global_place(std::span<const NodeId> replicas, const Topology& t) {
    if (replicas.empty()) throw DomainError("greedy_global_place: empty replica set");
    GreedyState state(t, replicas);
    const auto [node, cost] = state.best();
    if (node < 0) throw DomainError("greedy_global_place: every node is already a replica");
    return node;
}

std::vector<Placement> gg_order(const Topology& t, NodeId root) {
    if (root < 0 || root >= t.n) throw DomainError("gg_order: root out of range");
    const NodeId seed_set[] = {root};
    GreedyState state(t, seed_set);
    std::vector<Placement> order;
    order.reserve(static_cast<std::size_t>(t.n - 1));
    for (int step = 1; step < t.n; ++step) {
        const auto [node, cost] = state.best();
        state.add(node);
        order.push_back({node, static_cast<double>(cost)});
    }
    return order;
}

std::size_t hybrid_switch_index(std::span<const double> costs, double threshold) {
    if (costs.empty()) throw DomainError("hybrid_switch_index: empty cost list");
    for (std::size_t k = 1; k < costs.size(); ++k)
        if (costs[k] > threshold * costs[k - 1]) return k;
    return costs.size();
}

}  // namespace meshfill
