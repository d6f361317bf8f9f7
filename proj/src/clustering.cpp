#include "wrsn/clustering.hpp"

#include <stdexcept>

namespace wrsn {

std::vector<NodeId> ClusterSet::heads() const {
    std::vector<NodeId> out;
    out.reserve(clusters.size());
    for (const Cluster& c : clusters) out.push_back(c.head);
    return out;
}

int inclusion_count(const Scenario& scenario, NodeId center, double radius,
                    std::span<const NodeId> alive) {
    bool center_alive = false;
    for (NodeId id : alive) center_alive |= (id == center);
    if (!center_alive) throw std::invalid_argument("inclusion_count: center not alive");

    const Vec2 c = scenario.positions.at(static_cast<std::size_t>(center));
    const double r2 = radius * radius;
    int count = 0;
    for (NodeId id : alive)
        if (distance_sq(scenario.positions[static_cast<std::size_t>(id)], c) <= r2) ++count;
    return count;
}

ClusterSet cluster_nodes(const Scenario& scenario, double r_cl) {
    scenario.validate();
    if (!(r_cl >= 0.0)) throw std::invalid_argument("cluster_nodes: negative radius");

    const int n = scenario.size();
    const double r2 = r_cl * r_cl;
    std::vector<NodeId> alive(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) alive[static_cast<std::size_t>(i)] = i;

    ClusterSet out;
    out.r_cl = r_cl;
    std::vector<NodeId> next_alive;
    while (!alive.empty()) {
        // alive is kept in ascending id order, so the first strict maximum
        // is the lowest-id winner among ties.
        NodeId best = alive.front();
        int best_count = -1;
        for (NodeId cand : alive) {
            const Vec2 c = scenario.positions[static_cast<std::size_t>(cand)];
            int count = 0;
            for (NodeId other : alive)
                if (distance_sq(scenario.positions[static_cast<std::size_t>(other)], c) <= r2)
                    ++count;
            if (count > best_count) {
                best_count = count;
                best = cand;
            }
        }

        Cluster cluster;
        cluster.head = best;
        const Vec2 hp = scenario.positions[static_cast<std::size_t>(best)];
        next_alive.clear();
        for (NodeId id : alive) {
            if (id == best) continue;
            if (distance_sq(scenario.positions[static_cast<std::size_t>(id)], hp) <= r2)
                cluster.members.push_back(id);  // alive is ascending, members stay sorted
            else
                next_alive.push_back(id);
        }
        out.clusters.push_back(std::move(cluster));
        alive.swap(next_alive);
    }
    return out;
}

} // namespace wrsn
