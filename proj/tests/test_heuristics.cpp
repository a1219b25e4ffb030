#include <doctest.h>

#include <algorithm>
#include <vector>

#include "meshfill/error.hpp"
#include "meshfill/heuristics.hpp"
#include "oracles.hpp"

using namespace meshfill;

namespace {

Topology from_rows(std::vector<std::vector<int>> rows) {
    Topology t;
    t.n = static_cast<int>(rows.size());
    t.kind = TopologyKind::random;
    for (auto& r : rows) t.hops.insert(t.hops.end(), r.begin(), r.end());
    t.cluster_of.assign(rows.size(), 0);
    return t;
}

// Sorted random subset of [0, n) with `k` members.
std::vector<NodeId> subset(Rng& rng, int n, int k) {
    std::vector<NodeId> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(all[i], all[rng.uniform_int(0, i)]);
    all.resize(static_cast<std::size_t>(k));
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

TEST_CASE("bc_score examples") {
    const Topology t = from_rows({{0, 2, 4}, {2, 0, 1}, {4, 1, 0}});
    const NodeId both[] = {1, 2};
    // candidate 0 sees hops 2 and 4
    CHECK(bc_score(0, both, t) == doctest::Approx(0.75));
    const NodeId one[] = {2};
    CHECK(bc_score(1, one, t) == 1.0);
    CHECK_THROWS_AS(bc_score(0, std::span<const NodeId>{}, t), DomainError);
}

TEST_CASE("bc_score matches re-summation on random instances") {
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        const Topology t = generate_topology(TopologyKind::random, 10, derive_seed(5, k));
        const auto servers = subset(rng, 10, static_cast<int>(rng.uniform_int(1, 9)));
        for (NodeId c = 0; c < 10; ++c) {
            if (std::find(servers.begin(), servers.end(), c) != servers.end()) continue;
            CHECK(bc_score(c, servers, t) == doctest::Approx(oracle::bc_score(c, servers, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("bc_score grows when a server moves closer") {
    Topology t = generate_topology(TopologyKind::random, 8, 2);
    const NodeId servers[] = {1, 4, 6};
    const double before = bc_score(0, servers, t);
    t.hop(0, 4) -= 1;
    t.hop(4, 0) -= 1;
    CHECK(bc_score(0, servers, t) > before);
}

TEST_CASE("best_client_select examples") {
    const Topology t = from_rows({{0, 2, 5}, {2, 0, 3}, {5, 3, 0}});
    const NodeId servers[] = {0};
    const NodeId cands[] = {1, 2};
    const std::int64_t zeros[] = {0, 0};
    CHECK(best_client_select({0, servers, cands, zeros, zeros}, t, Policy::more_of_part) == 1);

    // Two candidates at the same distance: the policy decides.
    const Topology sym = from_rows({{0, 4, 4}, {4, 0, 2}, {4, 2, 0}});
    const std::int64_t part[] = {10, 40};
    const std::int64_t total[] = {500, 100};
    CHECK(best_client_select({0, servers, cands, part, total}, sym, Policy::more_of_part) == 2);
    CHECK(best_client_select({0, servers, cands, part, total}, sym, Policy::less_of_part) == 1);
    CHECK(best_client_select({0, servers, cands, part, total}, sym, Policy::more_total) == 1);
    CHECK(best_client_select({0, servers, cands, part, total}, sym, Policy::less_total) == 2);
    CHECK(best_client_select({0, servers, cands, zeros, zeros}, sym, Policy::less_total) == 1);

    CHECK_FALSE(best_client_select({0, servers, {}, {}, {}}, t, Policy::more_of_part).has_value());
}

TEST_CASE("best_client_select matches exhaustive search") {
    Rng rng(2);
    for (int k = 0; k < 300; ++k) {
        const int n = 12;
        const Topology t = k % 2 ? generate_topology(TopologyKind::random, n, derive_seed(9, k))
                                 : oracle::random_hops(n, derive_seed(9, k), 1, 4);
        const auto servers = subset(rng, n, static_cast<int>(rng.uniform_int(1, 4)));
        std::vector<NodeId> cands;
        for (NodeId c = 0; c < n; ++c)
            if (!std::binary_search(servers.begin(), servers.end(), c) && rng.unit() < 0.8) cands.push_back(c);
        std::vector<std::int64_t> pp, pt;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            pp.push_back(rng.uniform_int(0, 3));
            pt.push_back(rng.uniform_int(0, 3));
        }
        for (Policy p : {Policy::less_of_part, Policy::more_of_part, Policy::less_total, Policy::more_total})
            REQUIRE(best_client_select({0, servers, cands, pp, pt}, t, p) ==
                    oracle::best_client(cands, servers, pp, pt, t, p));
    }
}

TEST_CASE("best_client_select is scale invariant") {
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        Topology t = generate_topology(TopologyKind::random, 10, derive_seed(4, k));
        const auto servers = subset(rng, 10, 3);
        std::vector<NodeId> cands;
        for (NodeId c = 0; c < 10; ++c)
            if (!std::binary_search(servers.begin(), servers.end(), c)) cands.push_back(c);
        const std::vector<std::int64_t> zeros(cands.size(), 0);
        const auto before = best_client_select({0, servers, cands, zeros, zeros}, t, Policy::more_of_part);
        for (int& h : t.hops) h *= 3;
        CHECK(best_client_select({0, servers, cands, zeros, zeros}, t, Policy::more_of_part) == before);
    }
}

TEST_CASE("round_score keeps 12 significant digits") {
    CHECK(round_score(0.75) == 0.75);
    CHECK(round_score(1.0 / 3.0) == doctest::Approx(0.333333333333).epsilon(1e-15));
    CHECK(round_score(0.1 + 0.2) == round_score(0.3));
    CHECK(round_score(0.0) == 0.0);
}

TEST_CASE("gg_cost examples") {
    const Topology t = generate_topology(TopologyKind::random, 5, 1);
    const NodeId all[] = {0, 1, 2, 3, 4};
    CHECK(gg_cost(all, t) == 0.0);
    // replica 0, clients at distances 2, 3, 4, 1
    const Topology star = from_rows({{0, 2, 3, 4, 1}, {2, 0, 9, 9, 9}, {3, 9, 0, 9, 9}, {4, 9, 9, 0, 9}, {1, 9, 9, 9, 0}});
    const NodeId r0[] = {0};
    CHECK(gg_cost(r0, star) == 10.0);
    CHECK_THROWS_AS(gg_cost(std::span<const NodeId>{}, t), DomainError);
}

TEST_CASE("greedy_global_place examples") {
    // center 0; leaves 1..4
    const Topology star = from_rows({{0, 1, 1, 1, 1}, {1, 0, 2, 2, 2}, {1, 2, 0, 2, 2}, {1, 2, 2, 0, 2}, {1, 2, 2, 2, 0}});
    const NodeId leaf[] = {1};
    CHECK(greedy_global_place(leaf, star) == 0);
    const Topology two = from_rows({{0, 3}, {3, 0}});
    const NodeId zero[] = {0};
    CHECK(greedy_global_place(zero, two) == 1);
    const NodeId both[] = {0, 1};
    CHECK_THROWS_AS(greedy_global_place(both, two), DomainError);
}

TEST_CASE("gg_order examples and monotone costs") {
    const Topology two = from_rows({{0, 3}, {3, 0}});
    const auto o = gg_order(two, 0);
    REQUIRE(o.size() == 1);
    CHECK(o[0].node == 1);
    CHECK(o[0].cost == 0.0);

    const Topology t = generate_topology(TopologyKind::line, 40, 6);
    const auto order = gg_order(t, 3);
    CHECK(order.size() == 39u);
    for (std::size_t k = 1; k < order.size(); ++k) CHECK(order[k].cost <= order[k - 1].cost);
    CHECK(order.back().cost == 0.0);
}

TEST_CASE("a node closest to everyone is placed first") {
    Topology t = oracle::random_hops(9, 4, 5, 9);
    for (NodeId i = 0; i < 9; ++i)
        if (i != 6) t.hop(6, i) = t.hop(i, 6) = 1;
    CHECK(gg_order(t, 0).front().node == 6);
}

TEST_CASE("gg functions match brute force") {
    Rng rng(7);
    for (int k = 0; k < 60; ++k) {
        const int n = static_cast<int>(rng.uniform_int(2, 20));
        const Topology t = oracle::random_hops(n, derive_seed(11, k), 1, 6);
        const auto reps = subset(rng, n, static_cast<int>(rng.uniform_int(1, n - 1)));
        CHECK(gg_cost(reps, t) == oracle::gg_cost(reps, t));
        CHECK(greedy_global_place(reps, t) == oracle::greedy_place(reps, t));
        const NodeId root = static_cast<NodeId>(rng.uniform_int(0, n - 1));
        const auto a = gg_order(t, root);
        const auto b = oracle::gg_order(t, root);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].node == b[i].node);
            CHECK(a[i].cost == b[i].cost);
        }
    }
}

TEST_CASE("hybrid_switch_index examples") {
    const double a[] = {100, 85};
    CHECK(hybrid_switch_index(a, 0.8) == 1);
    const double b[] = {100, 70, 69};
    CHECK(hybrid_switch_index(b, 0.8) == 2);
    const double c[] = {100, 10, 1};
    CHECK(hybrid_switch_index(c, 0.7) == 3);
    CHECK_THROWS_AS(hybrid_switch_index(std::span<const double>{}, 0.8), DomainError);
}

TEST_CASE("policy names") {
    CHECK(policy_from_string("1") == Policy::less_of_part);
    CHECK(policy_from_string("more_total") == Policy::more_total);
    CHECK(policy_number(Policy::less_total) == 3);
    CHECK_THROWS_AS(policy_from_string("5"), ConfigError);
}
