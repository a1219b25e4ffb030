#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "meshfill/topology.hpp"

namespace meshfill {

/// Tie-break among clients with equal Best-Client score.
enum class Policy {
    less_of_part,  // policy 1
    more_of_part,  // policy 2
    less_total,    // policy 3
    more_total,    // policy 4
};

std::string_view to_string(Policy p);
/// Accepts "1".."4" or the enum names. Throws ConfigError("policy", ...).
Policy policy_from_string(std::string_view name);
int policy_number(Policy p);

/// Inputs to one Best-Client decision for a single part.
/// progress_part / progress_total are indexed like `candidates`.
struct SelectionContext {
    int part = 0;
    std::span<const NodeId> servers;
    std::span<const NodeId> candidates;
    std::span<const std::int64_t> progress_part;
    std::span<const std::int64_t> progress_total;
};

/// Sum of 1/hops from `candidate` to every server. Throws DomainError when
/// `servers` is empty.
double bc_score(NodeId candidate, std::span<const NodeId> servers, const Topology& t);

/// x rounded to 12 significant digits; score ties are judged on this value.
double round_score(double x);

/// Candidate with the highest score; ties go to the policy, then lowest id.
/// std::nullopt iff there are no candidates.
std::optional<NodeId> best_client_select(const SelectionContext& ctx, const Topology& t, Policy policy);

/// Sum over non-replica nodes of the distance to their nearest replica.
/// Throws DomainError when `replicas` is empty.
double gg_cost(std::span<const NodeId> replicas, const Topology& t);

/// Non-replica node whose addition minimizes gg_cost (lowest id on ties).
/// Throws DomainError if replicas is empty or covers every node.
NodeId greedy_global_place(std::span<const NodeId> replicas, const Topology& t);

struct Placement {
    NodeId node;
    double cost;  // gg_cost after this node joins the replica set
};

/// Greedy placement sequence starting from {root} until every node is a
/// replica. Costs are non-increasing.
std::vector<Placement> gg_order(const Topology& t, NodeId root);

/// Smallest k >= 1 with costs[k] > threshold * costs[k-1], or costs.size()
/// when that never happens. Throws DomainError on an empty list.
std::size_t hybrid_switch_index(std::span<const double> costs, double threshold);

}  // namespace meshfill
