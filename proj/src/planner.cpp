#include "wrsn/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wrsn {

namespace {

// Candidate comparison: larger sector power wins; on equal power Stay beats
// Move, then the smaller direction angle.
inline bool better_candidate(double pa, const Action& a, double pb, const Action& b) {
    if (pa != pb) return pa > pb;
    if (a.kind != b.kind) return a.kind == ActionKind::Stay;
    return a.direction < b.direction;
}

struct RelVec {
    double dx, dy, d;
};

// Sector-limited beam power from eval offsets. `rel` holds receiver offsets
// from the evaluation position; u is the beam direction unit vector.
inline double sector_sum(const PropagationParams& prop, const PatternEval& pe,
                         double cos_half_angle, double half_angle,
                         std::span<const RelVec> rel, double ux, double uy,
                         double direction) {
    double sum = 0.0;
    for (const RelVec& r : rel) {
        if (r.d == 0.0) {
            // coincident target: bearing convention 0
            const double delta = normalize_angle(-direction);
            if (std::abs(delta) <= half_angle)
                sum += pe.gain_phi(delta) * prop.alpha / (prop.beta * prop.beta);
            continue;
        }
        const double c = (r.dx * ux + r.dy * uy) / r.d;
        if (c < cos_half_angle) continue;
        const double rng = r.d + prop.beta;
        sum += pe.gain_cos(c) * prop.alpha / (rng * rng);
    }
    return sum;
}

struct PlanScratch {
    std::vector<RelVec> rel;  // offsets from the current position
    std::vector<double> stay_power, move_power, bearings;
};

Action plan_step_impl(const ChargerConfig& cfg, const PropagationParams& prop,
                      const PatternEval& pe, const ChargerState& state,
                      std::span<const TargetRef> targets, PlanScratch& scratch,
                      const ExecConfig& exec) {
    if (targets.empty())
        throw std::invalid_argument("plan_step: no undercharged targets");

    const std::size_t u = targets.size();
    const double cos_half = std::cos(cfg.sector_half_angle);

    scratch.rel.resize(u);
    scratch.bearings.resize(u);
    for (std::size_t i = 0; i < u; ++i) {
        const double dx = targets[i].pos.x - state.pos.x;
        const double dy = targets[i].pos.y - state.pos.y;
        const double d = std::sqrt(dx * dx + dy * dy);
        scratch.rel[i] = {dx, dy, d};
        scratch.bearings[i] =
            (dx == 0.0 && dy == 0.0) ? 0.0 : normalize_angle(std::atan2(dy, dx));
    }

    scratch.stay_power.resize(u);
    scratch.move_power.resize(u);

    // Stay candidates share the precomputed offsets; Move candidates shift
    // them by one step. The loop over candidate bearings parallelizes when
    // the pair count is large (flat baseline); each candidate is evaluated
    // by exactly one thread so results do not depend on the job count.
    const std::size_t pairs = 2 * u * u;
    const bool par = exec.jobs != 1 && pairs >= static_cast<std::size_t>(exec.parallel_threshold);
    parallel_for(static_cast<int>(u), par ? exec.jobs : 1, [&](int j) {
        const std::size_t i = static_cast<std::size_t>(j);
        const double dir = scratch.bearings[i];
        const double ux = std::cos(dir), uy = std::sin(dir);
        scratch.stay_power[i] = sector_sum(prop, pe, cos_half, cfg.sector_half_angle,
                                           scratch.rel, ux, uy, dir);
        double pm = 0.0;
        const double sx = cfg.step_len * ux, sy = cfg.step_len * uy;
        for (const RelVec& r : scratch.rel) {
            const double dx = r.dx - sx, dy = r.dy - sy;
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d == 0.0) {
                const double delta = normalize_angle(-dir);
                if (std::abs(delta) <= cfg.sector_half_angle)
                    pm += pe.gain_phi(delta) * prop.alpha / (prop.beta * prop.beta);
                continue;
            }
            const double c = (dx * ux + dy * uy) / d;
            if (c < cos_half) continue;
            const double rng = d + prop.beta;
            pm += pe.gain_cos(c) * prop.alpha / (rng * rng);
        }
        scratch.move_power[i] = pm;
    });

    Action best{ActionKind::Stay, scratch.bearings[0]};
    double best_p = scratch.stay_power[0];
    for (std::size_t i = 0; i < u; ++i) {
        const Action stay{ActionKind::Stay, scratch.bearings[i]};
        if (better_candidate(scratch.stay_power[i], stay, best_p, best)) {
            best_p = scratch.stay_power[i];
            best = stay;
        }
        const Action move{ActionKind::Move, scratch.bearings[i]};
        if (better_candidate(scratch.move_power[i], move, best_p, best)) {
            best_p = scratch.move_power[i];
            best = move;
        }
    }
    return best;
}

} // namespace

std::vector<Action> candidate_actions(const ChargerState& state,
                                      std::span<const TargetRef> undercharged) {
    if (undercharged.empty())
        throw std::invalid_argument("candidate_actions: no undercharged targets");
    std::vector<double> bearings;
    bearings.reserve(undercharged.size());
    for (const TargetRef& t : undercharged) {
        const double b = bearing(state.pos, t.pos);
        if (std::find(bearings.begin(), bearings.end(), b) == bearings.end())
            bearings.push_back(b);
    }
    std::vector<Action> out;
    out.reserve(2 * bearings.size());
    for (double b : bearings) {
        out.push_back({ActionKind::Move, b});
        out.push_back({ActionKind::Stay, b});
    }
    return out;
}

double sector_power(const ChargerConfig& cfg, const PropagationParams& prop,
                    Vec2 eval_pos, double direction,
                    std::span<const TargetRef> undercharged) {
    const PatternEval pe(cfg.pattern);
    direction = normalize_angle(direction);
    std::vector<RelVec> rel(undercharged.size());
    for (std::size_t i = 0; i < undercharged.size(); ++i) {
        const double dx = undercharged[i].pos.x - eval_pos.x;
        const double dy = undercharged[i].pos.y - eval_pos.y;
        rel[i] = {dx, dy, std::sqrt(dx * dx + dy * dy)};
    }
    const Vec2 un = unit_vector(direction);
    return sector_sum(prop, pe, std::cos(cfg.sector_half_angle), cfg.sector_half_angle,
                      rel, un.x, un.y, direction);
}

Action plan_step(const ChargerConfig& cfg, const PropagationParams& prop,
                 const ChargerState& state, std::span<const TargetRef> undercharged) {
    const PatternEval pe(cfg.pattern);
    PlanScratch scratch;
    return plan_step_impl(cfg, prop, pe, state, undercharged, scratch, ExecConfig{1, 1 << 30});
}

Stage1Result run_stage1(const Scenario& scenario, const Stage1Task& task, Vec2 start,
                        const ChargerConfig& cfg, const PropagationParams& prop,
                        const MetricLevels& levels, std::vector<double> initial_energy,
                        const Stage1Options& options) {
    const int n = scenario.size();
    if (static_cast<int>(initial_energy.size()) != n)
        throw std::invalid_argument("run_stage1: energy vector size mismatch");
    if (task.heads.size() != task.head_target.size())
        throw std::invalid_argument("run_stage1: task size mismatch");

    const PatternEval pe(cfg.pattern);

    Stage1Result res;
    res.start = start;
    res.energy = std::move(initial_energy);

    // receiver coordinates, struct-of-arrays for the field kernel
    std::vector<double> rx_x(static_cast<std::size_t>(n)), rx_y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rx_x[static_cast<std::size_t>(i)] = scenario.positions[static_cast<std::size_t>(i)].x;
        rx_y[static_cast<std::size_t>(i)] = scenario.positions[static_cast<std::size_t>(i)].y;
    }

    struct Pending {
        TargetRef ref;
        double target;
    };
    std::vector<Pending> pending;
    pending.reserve(task.heads.size());
    for (std::size_t i = 0; i < task.heads.size(); ++i) {
        const NodeId id = task.heads[i];
        if (res.energy[static_cast<std::size_t>(id)] < task.head_target[i])
            pending.push_back({{id, scenario.positions[static_cast<std::size_t>(id)]},
                               task.head_target[i]});
    }

    ChargerState state{start, 0.0, 0.0};
    std::vector<TargetRef> targets;
    std::vector<double> gains(static_cast<std::size_t>(n));
    PlanScratch scratch;

    // While the charger is parked and the undercharged set is unchanged, the
    // plan inputs are bit-identical, so the previous action and the per-node
    // field are reused verbatim. The pending set only ever shrinks, so its
    // size identifies it.
    bool plan_cached = false;
    Vec2 plan_pos{};
    std::size_t plan_pending = 0;
    Action cached_action{};
    bool field_cached = false;
    Vec2 field_pos{};
    double field_dir = 0.0;
    std::vector<double> watts(static_cast<std::size_t>(n));

    std::int64_t last_sampled_step = -1;
    auto sample = [&](int stage) {
        res.series.push_back({state.elapsed, levels.count_at_target(res.energy),
                              levels.count_overcharged(res.energy), stage});
        last_sampled_step = res.steps;
    };
    if (options.record_series) sample(1);

    while (!pending.empty()) {
        if (res.steps >= options.max_steps)
            throw SimulationError(
                "stage 1 exceeded step budget (" + std::to_string(options.max_steps) +
                " steps, t=" + std::to_string(state.elapsed) + " s, " +
                std::to_string(pending.size()) + " heads still undercharged)");

        Action action;
        if (plan_cached && state.pos == plan_pos && pending.size() == plan_pending) {
            action = cached_action;
        } else {
            targets.clear();
            for (const Pending& p : pending) targets.push_back(p.ref);
            action = plan_step_impl(cfg, prop, pe, state, targets, scratch, options.exec);
            plan_cached = true;
            plan_pos = state.pos;
            plan_pending = pending.size();
            cached_action = action;
        }

        // energy deposit from the start-of-step position
        const Vec2 step_pos = state.pos;
        const Vec2 u = unit_vector(action.direction);
        if (!field_cached || !(step_pos == field_pos) || action.direction != field_dir) {
            const double act = 1.0;
            EmitterField field{&prop, &pe, {&step_pos.x, 1}, {&step_pos.y, 1},
                               {&u.x, 1}, {&u.y, 1}, {&act, 1}};
            field_power(field, rx_x, rx_y, watts, options.exec);
            field_cached = true;
            field_pos = step_pos;
            field_dir = action.direction;
        }
        double step_gain = 0.0;
        for (int i = 0; i < n; ++i) {
            gains[static_cast<std::size_t>(i)] = watts[static_cast<std::size_t>(i)] * cfg.dt;
            step_gain += gains[static_cast<std::size_t>(i)];
            res.energy[static_cast<std::size_t>(i)] += gains[static_cast<std::size_t>(i)];
        }
        res.energy_received += step_gain;

        bool clamped = false;
        if (action.kind == ActionKind::Move) {
            const Vec2 np = state.pos + cfg.step_len * u;
            if (np.x < 0.0 || np.x > scenario.area_side || np.y < 0.0 ||
                np.y > scenario.area_side) {
                clamped = true;  // border: hold position for this step
                ++res.clamped_steps;
            } else {
                state.pos = np;
            }
        }
        state.boresight = action.direction;
        state.elapsed += cfg.dt;
        ++res.steps;

        if (options.observer)
            options.observer({state.elapsed - cfg.dt, step_pos, action, clamped, gains,
                              res.energy});
        if (options.record_trajectory)
            res.trajectory.push_back({state.elapsed, state.pos, action.direction,
                                      clamped ? ActionKind::Stay : action.kind});

        std::erase_if(pending, [&](const Pending& p) {
            return res.energy[static_cast<std::size_t>(p.ref.id)] >= p.target;
        });

        if (options.record_series && res.steps % options.sample_every == 0) sample(1);
    }

    if (options.record_series && last_sampled_step != res.steps) sample(1);

    res.t_cm = state.elapsed;
    res.end_pos = state.pos;
    res.end_bearing = state.boresight;
    res.energy_transmitted = cfg.tx_power * state.elapsed;
    return res;
}

OptimizeResult optimize_start(const Scenario& scenario, const ClusterSet& clusters,
                              const Stage1Task& task, const ChargerConfig& cfg,
                              const PropagationParams& prop, const MetricLevels& levels,
                              const Stage1Options& options) {
    if (clusters.clusters.empty())
        throw std::invalid_argument("optimize_start: no clusters");

    const int np = clusters.head_count();
    std::vector<double> t_cm(static_cast<std::size_t>(np));

    // Candidate runs skip trajectory/series recording; the winner is
    // re-simulated below with the caller's options to materialize them.
    Stage1Options light;
    light.record_trajectory = false;
    light.record_series = false;
    light.max_steps = options.max_steps;
    light.exec.jobs = 1;

    const std::size_t n = scenario.positions.size();
    parallel_for(np, options.exec.jobs, [&](int i) {
        const NodeId head = clusters.clusters[static_cast<std::size_t>(i)].head;
        const Vec2 start = scenario.positions[static_cast<std::size_t>(head)];
        const Stage1Result r = run_stage1(scenario, task, start, cfg, prop, levels,
                                          std::vector<double>(n, 0.0), light);
        t_cm[static_cast<std::size_t>(i)] = r.t_cm;
    });

    int best = 0;
    for (int i = 1; i < np; ++i) {
        const double ti = t_cm[static_cast<std::size_t>(i)];
        const double tb = t_cm[static_cast<std::size_t>(best)];
        const NodeId hi = clusters.clusters[static_cast<std::size_t>(i)].head;
        const NodeId hb = clusters.clusters[static_cast<std::size_t>(best)].head;
        if (ti < tb || (ti == tb && hi < hb)) best = i;
    }

    OptimizeResult out;
    out.best_head = clusters.clusters[static_cast<std::size_t>(best)].head;
    out.best_start = scenario.positions[static_cast<std::size_t>(out.best_head)];
    out.starts_evaluated = np;
    out.result = run_stage1(scenario, task, out.best_start, cfg, prop, levels,
                            std::vector<double>(n, 0.0), options);
    out.t_cm = out.result.t_cm;
    return out;
}

} // namespace wrsn
