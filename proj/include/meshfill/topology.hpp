#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "meshfill/rng.hpp"

namespace meshfill {

using NodeId = int;

enum class TopologyKind { line, triangle, random };

std::string_view to_string(TopologyKind kind);
/// Throws ConfigError("kind", ...) on unknown names.
TopologyKind topology_kind_from_string(std::string_view name);

/// Number of clusters a kind partitions its nodes into.
int cluster_count(TopologyKind kind);

/// Symmetric hop-count matrix over n nodes, with per-node cluster labels.
struct Topology {
    int n = 0;
    TopologyKind kind = TopologyKind::random;
    std::vector<int> hops;        // row-major n*n
    std::vector<int> cluster_of;  // size n

    int hop(NodeId i, NodeId j) const { return hops[static_cast<std::size_t>(i) * n + j]; }
    int& hop(NodeId i, NodeId j) { return hops[static_cast<std::size_t>(i) * n + j]; }

    friend bool operator==(const Topology&, const Topology&) = default;
};

/// Inclusive hop-count window sampled for one class of node pairs.
struct HopWindow {
    int lo;
    int hi;
    double mean() const { return 0.5 * (lo + hi); }
};

inline constexpr HopWindow kIntraClusterHops{2, 6};
inline constexpr HopWindow kLineAdjacentHops{7, 11};
inline constexpr HopWindow kLineOneApartHops{10, 14};
inline constexpr HopWindow kLineTwoApartHops{13, 17};
inline constexpr HopWindow kTriangleInterHops{10, 14};
inline constexpr HopWindow kRandomHops{5, 15};

/// Window used for a pair of nodes in clusters a and b.
HopWindow hop_window(TopologyKind kind, int cluster_a, int cluster_b);

/// Hop counts are drawn per unordered pair (i < j, row-major) from the
/// window of the pair's class. Line needs n divisible by 4; triangle splits
/// n into 3 near-equal contiguous clusters (sizes differ by at most one).
Topology generate_topology(TopologyKind kind, int n, Seed seed);

/// Selects unordered pairs i < j.
struct PairClass {
    enum class Kind { all, intra, inter };
    Kind kind = Kind::all;
    int separation = 0;  // inter only: |cluster_i - cluster_j|, 0 = any

    static PairClass all_pairs() { return {Kind::all, 0}; }
    static PairClass intra_cluster() { return {Kind::intra, 0}; }
    static PairClass inter_cluster(int separation = 0) { return {Kind::inter, separation}; }
};

/// Mean hop count over the selected pairs. Throws DomainError if none match.
double mean_distance(const Topology& t, PairClass filter);

/// Checks zero diagonal, symmetry, off-diagonal >= 1 and label count.
/// Throws DomainError describing the first violation.
void validate(const Topology& t);

/// Text form: "n kind", n rows of n integers, one row of n cluster labels.
void write_topology(std::ostream& out, const Topology& t);
Topology read_topology(std::istream& in);

}  // namespace meshfill
