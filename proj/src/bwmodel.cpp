#include "meshfill/bwmodel.hpp"

#include <algorithm>

#include "meshfill/error.hpp"

namespace meshfill {

void BandwidthParams::validate() const {
    if (!(bw_ref > 0.0)) throw ConfigError("bw_ref", "must be positive");
    if (!(bw_floor > 0.0)) throw ConfigError("bw_floor", "must be positive");
    if (!(bw_ceil >= bw_floor)) throw ConfigError("bw_ceil", "must be at least bw_floor");
    if (!(gen_noise >= 0.0 && gen_noise < 1.0)) throw ConfigError("gen_noise", "must lie in [0, 1)");
    if (!(slot_noise >= 0.0 && slot_noise < 1.0)) throw ConfigError("slot_noise", "must lie in [0, 1)");
}

double nominal_bandwidth(int hops, const BandwidthParams& p) {
    return std::clamp(p.bw_ref / static_cast<double>(hops), p.bw_floor, p.bw_ceil);
}

LinkTable build_links(const Topology& t, const BandwidthParams& p, Seed seed) {
    LinkTable links;
    links.n = t.n;
    links.base_bw.assign(static_cast<std::size_t>(t.n) * t.n, 0.0);
    Rng rng(seed);
    for (NodeId i = 0; i < t.n; ++i) {
        for (NodeId j = i + 1; j < t.n; ++j) {
            const double eps = rng.uniform(-p.gen_noise, p.gen_noise);
            const double bw = nominal_bandwidth(t.hop(i, j), p) * (1.0 + eps);
            links.base_bw[static_cast<std::size_t>(i) * t.n + j] = bw;
            links.base_bw[static_cast<std::size_t>(j) * t.n + i] = bw;
        }
    }
    return links;
}

double slot_bandwidth(double base, const BandwidthParams& p, Rng& rng) {
    return slot_bandwidth_from_unit(base, p, rng.unit());
}

double capacitated_client_bw(std::span<const double> link_bws, std::span<const double> server_spare,
                             double client_cap) {
    if (link_bws.size() != server_spare.size())
        throw DomainError("capacitated_client_bw: link and spare lists differ in length");
    double total = 0.0;
    for (std::size_t j = 0; j < link_bws.size(); ++j) total += std::min(link_bws[j], server_spare[j]);
    return std::min(total, client_cap);
}

}  // namespace meshfill
