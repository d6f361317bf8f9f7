#pragma once

#include <span>
#include <vector>

#include "wrsn/model.hpp"

namespace wrsn {

struct Cluster {
    NodeId head = 0;
    std::vector<NodeId> members;  // ascending id, head excluded; may be empty
};

// Partition of the node set produced by the inclusion-circle greedy
// procedure. Clusters appear in selection order (non-increasing inclusion
// count at selection time).
struct ClusterSet {
    std::vector<Cluster> clusters;
    double r_cl = 10.0;

    int head_count() const { return static_cast<int>(clusters.size()); }
    std::vector<NodeId> heads() const;
};

// Number of alive nodes within the closed disc of `radius` around `center`,
// center included. Throws if center is not alive.
int inclusion_count(const Scenario& scenario, NodeId center, double radius,
                    std::span<const NodeId> alive);

// Greedy partition: repeatedly turn the alive node with the largest inclusion
// count (ties: lowest id) into a head, absorb its disc, remove the cluster
// from the alive set. Deterministic for a given scenario and radius.
ClusterSet cluster_nodes(const Scenario& scenario, double r_cl);

} // namespace wrsn
