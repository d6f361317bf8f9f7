#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wrsn/clustering.hpp"
#include "wrsn/kernels.hpp"
#include "wrsn/model.hpp"
#include "wrsn/series.hpp"

namespace wrsn {

enum class OrderingPolicy { MaxDeficit, Fifo, Nearest };

struct Stage2Config {
    double dt = 0.0025;
    OrderingPolicy ordering = OrderingPolicy::MaxDeficit;
    double reserve = 2.0;           // J a transmitter keeps for itself
    double seller_threshold = 0.0;  // trading: ET_h; set by the engine
    double serve_radius = 20.0;     // m, trading seller activation
    double stall_window = 5.0;      // s
    double stall_epsilon = 1e-6;    // J
};

enum class Stage2Status { Complete, Stalled };

struct ActiveTransmitter {
    NodeId id = -1;
    NodeId target = -1;     // beamed member (pivot); -1 for omni sellers
    double boresight = 0.0; // pivot only
    bool omni = false;
    double fraction = 1.0;  // duty fraction of the step, (0, 1]
};

struct Stage2StepView {
    double t_start = 0.0;  // local stage-2 time at the start of the step
    std::span<const ActiveTransmitter> active;
    std::span<const double> gain;    // per node, J gained this step
    std::span<const double> energy;  // per node, after the step
};

struct Stage2Options {
    int sample_every = 100;
    std::int64_t max_steps = 100000000;
    double t_offset = 0.0;  // added to series timestamps
    ExecConfig exec{};
    std::function<void(const Stage2StepView&)> observer;
};

struct Stage2Result {
    double duration = 0.0;
    Stage2Status status = Stage2Status::Complete;
    std::vector<std::pair<NodeId, double>> unmet;  // (node, deficit), ascending id
    std::vector<double> head_before, head_after;   // cluster order
    std::vector<double> energy;                    // final per-node energy
    std::vector<SeriesSample> series;
    double energy_transmitted = 0.0;
    double energy_received = 0.0;
    std::int64_t steps = 0;
};

// Next member the head should beam at: among cluster members below ets,
// MaxDeficit picks the largest deficit, Fifo the lowest id, Nearest the
// closest to the head; all ties break to the lowest id. nullopt when every
// member is satisfied.
std::optional<NodeId> next_target(const Scenario& scenario, const Cluster& cluster,
                                  std::span<const double> energy, double ets,
                                  OrderingPolicy policy);

// Heads beam at policy targets in parallel; every undercharged non-head node
// harvests the superposed directional field (leakage included). A head never
// spends below the reserve; its last transmission is truncated to a fraction
// of the step. Terminates Complete when all non-heads reach ets, Stalled when
// no further progress is possible.
Stage2Result run_stage2_pivot(const Scenario& scenario, const ClusterSet& clusters,
                              std::span<const double> energy_after_stage1, double ets,
                              const Stage2Config& cfg, const PropagationParams& prop,
                              const AntennaPattern& pattern, double tx_power,
                              const MetricLevels& levels, const Stage2Options& options = {});

// Energy trading: any node at or above seller_threshold becomes a seller
// (heads from the start, other nodes as they cross it) and stays one until
// drained to the reserve. A seller transmits omni whenever a node below
// seller_threshold sits within serve_radius; all non-sellers below
// seller_threshold harvest the superposition. Complete when every non-seller
// is at ets.
Stage2Result run_stage2_trading(const Scenario& scenario, const ClusterSet& clusters,
                                std::span<const double> energy_after_stage1, double ets,
                                const Stage2Config& cfg, const PropagationParams& prop,
                                double tx_power, const MetricLevels& levels,
                                const Stage2Options& options = {});

} // namespace wrsn
