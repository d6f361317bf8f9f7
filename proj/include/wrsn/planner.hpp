#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wrsn/clustering.hpp"
#include "wrsn/kernels.hpp"
#include "wrsn/model.hpp"
#include "wrsn/series.hpp"

namespace wrsn {

// Mobile charger parameters. The implied speed is step_len/dt (defaults:
// 0.05 m per 2.5 ms = 20 m/s).
struct ChargerConfig {
    double dt = 0.0025;                           // s
    double step_len = 0.05;                       // m
    double sector_half_angle = 22.0 * kDegToRad;  // rad
    AntennaPattern pattern{};
    double tx_power = 2.0;  // W, accounting only; see derive_tx_power

    double speed() const { return step_len / dt; }
};

struct ChargerState {
    Vec2 pos;
    double boresight = 0.0;
    double elapsed = 0.0;
};

enum class ActionKind : std::uint8_t { Move, Stay };

struct Action {
    ActionKind kind = ActionKind::Stay;
    double direction = 0.0;  // beam bearing; travel bearing too when Move
};

// An undercharged charging target as the planner sees it.
struct TargetRef {
    NodeId id = 0;
    Vec2 pos;
};

// Move and Stay toward each undercharged target's bearing; bearings that
// compare equal are emitted once. Throws on an empty target list.
std::vector<Action> candidate_actions(const ChargerState& state,
                                      std::span<const TargetRef> undercharged);

// Summed received power of the undercharged targets inside the service
// sector (|bearing - direction| <= sector_half_angle) for a beam along
// `direction` from `eval_pos`. Targets outside the sector contribute 0.
double sector_power(const ChargerConfig& cfg, const PropagationParams& prop,
                    Vec2 eval_pos, double direction,
                    std::span<const TargetRef> undercharged);

// Greedy step rule: evaluate every candidate (Move candidates from the
// stepped position, Stay from the current one) and return the sector_power
// argmax. Ties: Stay before Move, then the smaller direction angle.
Action plan_step(const ChargerConfig& cfg, const PropagationParams& prop,
                 const ChargerState& state, std::span<const TargetRef> undercharged);

struct TrajectoryPoint {
    double t = 0.0;        // elapsed at the end of the step
    Vec2 pos;              // position at the end of the step
    double bearing = 0.0;  // beam bearing during the step
    ActionKind kind = ActionKind::Stay;  // executed action (clamped Move => Stay)
};

// Stage-1 charging targets: the node ids the charger must bring to
// per-target levels before the run ends.
struct Stage1Task {
    std::vector<NodeId> heads;
    std::vector<double> head_target;  // aligned with heads
};

struct Stage1StepView {
    double t_start = 0.0;
    Vec2 charger_pos;
    Action action;                   // planned action
    bool clamped = false;            // Move hit the area border and became Stay
    std::span<const double> gain;    // per-node energy gained this step, J
    std::span<const double> energy;  // per-node energy after the step, J
};

struct Stage1Options {
    bool record_trajectory = true;
    bool record_series = true;
    int sample_every = 100;
    std::int64_t max_steps = 100000000;
    ExecConfig exec{};
    std::function<void(const Stage1StepView&)> observer;  // test hook
};

struct Stage1Result {
    double t_cm = 0.0;  // elapsed charging time
    std::int64_t steps = 0;
    std::int64_t clamped_steps = 0;
    Vec2 start, end_pos;
    double end_bearing = 0.0;
    std::vector<double> energy;  // final per-node energy
    std::vector<TrajectoryPoint> trajectory;
    std::vector<SeriesSample> series;
    double energy_received = 0.0;
    double energy_transmitted = 0.0;
};

// Discrete-time stage-1 loop: plan a step, deposit one dt of field energy on
// every node from the start-of-step position (explicit Euler), move if the
// action says so and the area allows it, until every task head is at target.
// Throws SimulationError when max_steps is exceeded.
Stage1Result run_stage1(const Scenario& scenario, const Stage1Task& task, Vec2 start,
                        const ChargerConfig& cfg, const PropagationParams& prop,
                        const MetricLevels& levels, std::vector<double> initial_energy,
                        const Stage1Options& options = {});

struct OptimizeResult {
    Vec2 best_start;
    NodeId best_head = -1;
    double t_cm = 0.0;
    int starts_evaluated = 0;
    Stage1Result result;  // the winning run, fully materialized
};

// Runs stage 1 once per cluster-head location and keeps the fastest start
// (ties: lowest head id). Candidate runs execute concurrently under
// options.exec; the merge is a deterministic argmin.
OptimizeResult optimize_start(const Scenario& scenario, const ClusterSet& clusters,
                              const Stage1Task& task, const ChargerConfig& cfg,
                              const PropagationParams& prop, const MetricLevels& levels,
                              const Stage1Options& options = {});

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace wrsn
