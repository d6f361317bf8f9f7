#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "wrsn/clustering.hpp"
#include "wrsn/io.hpp"

using namespace wrsn;

namespace {

Scenario tiny(std::vector<Vec2> positions, double area = 100.0) {
    Scenario s;
    s.area_side = area;
    s.positions = std::move(positions);
    return s;
}

void check_partition(const Scenario& s, const ClusterSet& cs) {
    std::set<NodeId> seen;
    for (const Cluster& c : cs.clusters) {
        CHECK(seen.insert(c.head).second);
        const Vec2 hp = s.positions[(std::size_t)c.head];
        for (NodeId m : c.members) {
            CHECK(seen.insert(m).second);
            CHECK(distance(hp, s.positions[(std::size_t)m]) <= cs.r_cl + 1e-12);
        }
    }
    CHECK((int)seen.size() == s.size());
}

} // namespace

TEST_CASE("inclusion_count basics") {
    const Scenario s = tiny({{0, 0}, {5, 0}, {20, 0}});
    std::vector<NodeId> alive{0, 1, 2};

    CHECK(inclusion_count(s, 0, 10.0, alive) == 2);
    CHECK(inclusion_count(s, 1, 10.0, alive) == 2);
    CHECK(inclusion_count(s, 2, 10.0, alive) == 1);
    CHECK(inclusion_count(s, 0, 0.0, alive) == 1);  // itself only

    std::vector<NodeId> partial{0, 2};
    CHECK(inclusion_count(s, 0, 10.0, partial) == 1);
    CHECK_THROWS_AS(inclusion_count(s, 1, 10.0, partial), std::invalid_argument);
}

TEST_CASE("inclusion circles: the five-node picture") {
    // node 1 is central and covers all five; node 2's circle covers {1,2,3}
    const Scenario s = tiny({{30, 38}, {30, 30}, {30, 22}, {36, 25}, {23, 34}});
    std::vector<NodeId> alive{0, 1, 2, 3, 4};
    CHECK(inclusion_count(s, 1, 10.0, alive) == 5);
    CHECK(inclusion_count(s, 2, 10.0, alive) == 3);
    const ClusterSet cs = cluster_nodes(s, 10.0);
    CHECK(cs.clusters.size() == 1);
    CHECK(cs.clusters.front().head == 1);
}

TEST_CASE("cluster_nodes small cases") {
    SUBCASE("two clusters, tie broken by lowest id") {
        const Scenario s = tiny({{0, 0}, {5, 0}, {20, 0}});
        const ClusterSet cs = cluster_nodes(s, 10.0);
        REQUIRE(cs.clusters.size() == 2);
        CHECK(cs.clusters[0].head == 0);
        CHECK(cs.clusters[0].members == std::vector<NodeId>{1});
        CHECK(cs.clusters[1].head == 2);
        CHECK(cs.clusters[1].members.empty());
    }
    SUBCASE("single node") {
        const ClusterSet cs = cluster_nodes(tiny({{4, 4}}), 10.0);
        REQUIRE(cs.clusters.size() == 1);
        CHECK(cs.clusters[0].head == 0);
        CHECK(cs.clusters[0].members.empty());
    }
    SUBCASE("radius 0 keeps co-located nodes together") {
        const Scenario s = tiny({{1, 1}, {1, 1}, {2, 2}});
        const ClusterSet cs = cluster_nodes(s, 0.0);
        REQUIRE(cs.clusters.size() == 2);
        CHECK(cs.clusters[0].head == 0);
        CHECK(cs.clusters[0].members == std::vector<NodeId>{1});
    }
}

TEST_CASE("cluster_nodes equals the brute-force oracle") {
    const ClusterSet a = cluster_nodes(generate_scenario(12, 100.0, 7), 10.0);
    const ClusterSet b = oracle::cluster(generate_scenario(12, 100.0, 7), 10.0);
    CHECK(oracle::cluster_sets_equal(a, b));

    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + (int)(gen() % 12);
        const Scenario s = generate_scenario(n, 40.0, gen());
        const ClusterSet got = cluster_nodes(s, 10.0);
        const ClusterSet want = oracle::cluster(s, 10.0);
        REQUIRE_MESSAGE(oracle::cluster_sets_equal(got, want),
                        "mismatch on trial " << trial << " (n=" << n << ")");
    }
}

TEST_CASE("cluster invariants on large random scenarios") {
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 10; ++trial) {
        const Scenario s = generate_scenario(200, 100.0, gen());
        const ClusterSet cs = cluster_nodes(s, 10.0);
        check_partition(s, cs);

        // greedy dominance replay: when each head was chosen, no then-alive
        // node had a strictly larger inclusion count
        std::vector<NodeId> alive;
        for (int i = 0; i < s.size(); ++i) alive.push_back(i);
        for (const Cluster& c : cs.clusters) {
            const int head_count = inclusion_count(s, c.head, cs.r_cl, alive);
            for (NodeId other : alive)
                CHECK(inclusion_count(s, other, cs.r_cl, alive) <= head_count);
            std::erase_if(alive, [&](NodeId id) {
                return id == c.head ||
                       std::find(c.members.begin(), c.members.end(), id) != c.members.end();
            });
        }
        CHECK(alive.empty());
    }
}

TEST_CASE("cluster determinism: byte-identical serialization") {
    const Scenario s = generate_scenario(150, 100.0, 5);
    const ClusterSet a = cluster_nodes(s, 10.0);
    const ClusterSet b = cluster_nodes(s, 10.0);
    CHECK(oracle::cluster_sets_equal(a, b));

    nlohmann::ordered_json ja, jb;
    for (const Cluster& c : a.clusters) ja.push_back({{"head", c.head}, {"members", c.members}});
    for (const Cluster& c : b.clusters) jb.push_back({{"head", c.head}, {"members", c.members}});
    CHECK(ja.dump() == jb.dump());
}
