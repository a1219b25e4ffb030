#include "meshfill/topology.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "meshfill/error.hpp"

namespace meshfill {

std::string_view to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::line: return "line";
        case TopologyKind::triangle: return "triangle";
        case TopologyKind::random: return "random";
    }
    return "?";
}

TopologyKind topology_kind_from_string(std::string_view name) {
    if (name == "line") return TopologyKind::line;
    if (name == "triangle") return TopologyKind::triangle;
    if (name == "random") return TopologyKind::random;
    throw ConfigError("kind", "expected one of line|triangle|random, got '" + std::string(name) + "'");
}

int cluster_count(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::line: return 4;
        case TopologyKind::triangle: return 3;
        case TopologyKind::random: return 1;
    }
    return 1;
}

HopWindow hop_window(TopologyKind kind, int cluster_a, int cluster_b) {
    if (kind == TopologyKind::random) return kRandomHops;
    const int sep = std::abs(cluster_a - cluster_b);
    if (sep == 0) return kIntraClusterHops;
    if (kind == TopologyKind::triangle) return kTriangleInterHops;
    switch (sep) {
        case 1: return kLineAdjacentHops;
        case 2: return kLineOneApartHops;
        default: return kLineTwoApartHops;
    }
}

namespace {

std::vector<int> contiguous_clusters(int n, int clusters) {
    // First n % clusters clusters get one extra node.
    std::vector<int> labels(static_cast<std::size_t>(n));
    const int base = n / clusters;
    const int extra = n % clusters;
    int node = 0;
    for (int c = 0; c < clusters; ++c) {
        const int size = base + (c < extra ? 1 : 0);
        for (int k = 0; k < size; ++k) labels[static_cast<std::size_t>(node++)] = c;
    }
    return labels;
}

}  // namespace

Topology generate_topology(TopologyKind kind, int n, Seed seed) {
    if (n < 2) throw ConfigError("n", "node count must be at least 2, got " + std::to_string(n));
    const int clusters = cluster_count(kind);
    if (kind == TopologyKind::line && n % clusters != 0)
        throw ConfigError("n", "line topology needs n divisible by 4, got " + std::to_string(n));
    if (n < clusters)
        throw ConfigError("n", std::string(to_string(kind)) + " topology needs at least " +
                                   std::to_string(clusters) + " nodes");

    Topology t;
    t.n = n;
    t.kind = kind;
    t.cluster_of = contiguous_clusters(n, clusters);
    t.hops.assign(static_cast<std::size_t>(n) * n, 0);

    Rng rng(seed);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            const HopWindow w = hop_window(kind, t.cluster_of[i], t.cluster_of[j]);
            const int h = static_cast<int>(rng.uniform_int(w.lo, w.hi));
            t.hop(i, j) = h;
            t.hop(j, i) = h;
        }
    }
    return t;
}

double mean_distance(const Topology& t, PairClass filter) {
    double sum = 0.0;
    long count = 0;
    for (NodeId i = 0; i < t.n; ++i) {
        for (NodeId j = i + 1; j < t.n; ++j) {
            const int sep = std::abs(t.cluster_of[i] - t.cluster_of[j]);
            bool take = false;
            switch (filter.kind) {
                case PairClass::Kind::all: take = true; break;
                case PairClass::Kind::intra: take = sep == 0; break;
                case PairClass::Kind::inter:
                    take = sep != 0 && (filter.separation == 0 || sep == filter.separation);
                    break;
            }
            if (take) {
                sum += t.hop(i, j);
                ++count;
            }
        }
    }
    if (count == 0) throw DomainError("mean_distance: pair class selects no pairs");
    return sum / static_cast<double>(count);
}

void validate(const Topology& t) {
    if (t.n < 1) throw DomainError("topology: empty");
    if (t.hops.size() != static_cast<std::size_t>(t.n) * t.n)
        throw DomainError("topology: hop matrix is not n x n");
    if (t.cluster_of.size() != static_cast<std::size_t>(t.n))
        throw DomainError("topology: cluster label count differs from n");
    for (NodeId i = 0; i < t.n; ++i) {
        if (t.hop(i, i) != 0) throw DomainError("topology: nonzero diagonal at " + std::to_string(i));
        for (NodeId j = i + 1; j < t.n; ++j) {
            if (t.hop(i, j) != t.hop(j, i))
                throw DomainError("topology: asymmetric at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
            if (t.hop(i, j) < 1)
                throw DomainError("topology: hop count below 1 at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
        }
    }
}

void write_topology(std::ostream& out, const Topology& t) {
    out << t.n << ' ' << to_string(t.kind) << '\n';
    for (NodeId i = 0; i < t.n; ++i) {
        for (NodeId j = 0; j < t.n; ++j) {
            if (j) out << ' ';
            out << t.hop(i, j);
        }
        out << '\n';
    }
    for (NodeId i = 0; i < t.n; ++i) {
        if (i) out << ' ';
        out << t.cluster_of[i];
    }
    out << '\n';
}

Topology read_topology(std::istream& in) {
    Topology t;
    std::string kind;
    if (!(in >> t.n >> kind) || t.n < 1) throw DomainError("topology file: bad header");
    t.kind = topology_kind_from_string(kind);
    t.hops.resize(static_cast<std::size_t>(t.n) * t.n);
    for (auto& h : t.hops)
        if (!(in >> h)) throw DomainError("topology file: truncated hop matrix");
    t.cluster_of.resize(static_cast<std::size_t>(t.n));
    for (auto& c : t.cluster_of)
        if (!(in >> c)) throw DomainError("topology file: truncated cluster labels");
    validate(t);
    return t;
}

}  // namespace meshfill
