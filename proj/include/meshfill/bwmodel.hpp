#pragma once

#include <span>
#include <vector>

#include "meshfill/rng.hpp"
#include "meshfill/topology.hpp"

namespace meshfill {

/// Point-to-point bandwidth model. All rates are bytes/second.
struct BandwidthParams {
    double bw_ref = 1.5e6;    // rate at hop count 1
    double bw_floor = 2.0e4;
    double bw_ceil = 1.5e6;
    double gen_noise = 0.25;  // fractional half-width, fixed per pair for a run
    double slot_noise = 0.05; // fractional half-width, redrawn per link per slot

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Noise-free rate for a hop count: bw_ref / hops clamped to [floor, ceil].
double nominal_bandwidth(int hops, const BandwidthParams& p);

/// Generation-time link bandwidths, fixed for the lifetime of a run.
struct LinkTable {
    int n = 0;
    std::vector<double> base_bw;  // row-major n*n, symmetric, zero diagonal

    double at(NodeId i, NodeId j) const { return base_bw[static_cast<std::size_t>(i) * n + j]; }

    friend bool operator==(const LinkTable&, const LinkTable&) = default;
};

/// base_bw[i][j] = nominal(hops[i][j]) * (1 + e), e ~ U(-gen_noise, gen_noise)
/// drawn once per unordered pair in row-major i < j order.
LinkTable build_links(const Topology& t, const BandwidthParams& p, Seed seed);

/// base * (1 + d), d ~ U(-slot_noise, slot_noise).
double slot_bandwidth(double base, const BandwidthParams& p, Rng& rng);

/// Same rule driven by a caller-supplied uniform draw in [0, 1).
inline double slot_bandwidth_from_unit(double base, const BandwidthParams& p, double unit) {
    return base * (1.0 + p.slot_noise * (2.0 * unit - 1.0));
}

/// Slot bandwidth of the directed link server -> client during `slot`. The
/// draw is keyed on the unordered pair, so both directions see the same value.
inline double link_slot_bandwidth(const LinkTable& links, const BandwidthParams& p, Seed noise_seed,
                                  int slot, NodeId server, NodeId client) {
    const auto lo = static_cast<std::uint64_t>(server < client ? server : client);
    const auto hi = static_cast<std::uint64_t>(server < client ? client : server);
    const double u = keyed_unit(noise_seed, static_cast<std::uint64_t>(slot), lo, hi);
    return slot_bandwidth_from_unit(links.at(server, client), p, u);
}

/// Realized client rate under per-node caps:
/// min(sum_j min(link_bws[j], server_spare[j]), u). Throws DomainError on
/// length mismatch.
double capacitated_client_bw(std::span<const double> link_bws, std::span<const double> server_spare,
                             double client_cap);

}  // namespace meshfill
