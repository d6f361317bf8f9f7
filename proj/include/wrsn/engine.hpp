#pragma once

#include <optional>
#include <span>
#include <string>

#include "wrsn/clustering.hpp"
#include "wrsn/planner.hpp"
#include "wrsn/stage2.hpp"

namespace wrsn {

enum class SchemeKind { Pivot, Trading, Flat };

std::string scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);

// Head target levels by node count, nearest table row (ties toward the
// smaller count).
namespace table1 {
double pivot_head_target(int n_nodes);    // ET_p
double trading_head_target(int n_nodes);  // ET_h
} // namespace table1

struct SchemeSpec {
    SchemeKind kind = SchemeKind::Pivot;
    double ets = 2.0;                  // ET_s, J
    std::optional<double> head_target; // ET_p / ET_h; empty => table lookup by N
    double r_cl = 10.0;                // clustering radius, m
    PropagationParams prop{};
    ChargerConfig charger{};           // includes the shared antenna pattern
    Stage2Config stage2{};
    bool singleton_target_ets = false; // charge memberless heads only to ET_s

    double resolved_head_target(int n_nodes) const;
};

struct EngineOptions {
    int sample_every = 100;
    bool record_trajectory = true;
    std::int64_t max_steps = 100000000;
    ExecConfig exec{};
    std::function<void(const Stage1StepView&)> stage1_observer;
    std::function<void(const Stage2StepView&)> stage2_observer;
};

struct HeadProfile {
    NodeId head = -1;
    double before = 0.0;
    double after = 0.0;
};

struct RunResult {
    SchemeKind scheme = SchemeKind::Pivot;
    double t_stage1 = 0.0, t_stage2 = 0.0, t_total = 0.0;
    Stage2Status status = Stage2Status::Complete;
    bool complete = true;
    double head_target = 0.0, ets = 2.0;
    int n_clusters = 0;
    NodeId start_head = -1;
    Vec2 start;
    int starts_evaluated = 0;
    int n_at_target_stage1_end = 0;
    int n_overcharged_stage1_end = 0;
    std::int64_t clamped_steps = 0;
    std::vector<SeriesSample> series;  // stage-tagged, strictly increasing t
    std::vector<TrajectoryPoint> trajectory;
    std::vector<double> final_energy;
    std::vector<SensorNode> nodes;  // final per-node state with role and target
    std::vector<HeadProfile> head_profile;
    std::vector<std::pair<NodeId, double>> unmet;
    double efficiency = 0.0;
    double energy_transmitted = 0.0, energy_received = 0.0;
    ClusterSet clusters;
};

// Full scheme pipeline: cluster, optimize the starting spot, run stage 1,
// run the scheme's stage 2 (none for Flat). Stalled stage-2 runs still
// return full metrics.
RunResult run_scheme(const Scenario& scenario, const SchemeSpec& spec,
                     const EngineOptions& options = {});

// Flat comparison baseline: the same greedy planner steering toward every
// undercharged node, done when all nodes reach ets. The flat charger is
// omni-directional (the plain alpha/(d+beta)^2 model, 0 dB gain), matching
// the non-beamforming scheme it stands in for. Starts at the first cluster
// head (the densest inclusion disc).
RunResult run_flat_baseline(const Scenario& scenario, const SchemeSpec& spec,
                            const EngineOptions& options = {});

struct CalibrationResult {
    double target = 0.0;
    bool feasible = false;
    int runs = 0;
};

// Smallest stage-1 head target whose full run completes, found by bisection
// to `tol` joules. Infeasible when even `hi` stalls.
CalibrationResult calibrate_target(const Scenario& scenario, const SchemeSpec& spec,
                                   double lo, double hi, double tol = 0.1,
                                   const EngineOptions& options = {});

// One sweep run reduced to the fields the aggregate tables need.
struct RunRecord {
    std::string scheme;
    int n = 0;
    std::uint64_t seed = 0;
    double t_total = 0.0;
    bool complete = true;
    int overcharged_stage1 = 0;
};

struct SummaryRow {
    std::string scheme;
    int n = 0;
    int runs = 0;
    double t_mean = 0.0, t_min = 0.0, t_max = 0.0;
    double completion_rate = 0.0;
    double mean_overcharged_stage1 = 0.0;
};

// Per (scheme, n) aggregation, rows ordered by (scheme, n).
std::vector<SummaryRow> summarize(std::span<const RunRecord> records);

} // namespace wrsn
