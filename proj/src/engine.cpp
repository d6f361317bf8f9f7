#include "wrsn/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wrsn {

std::string scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Pivot: return "pivot";
        case SchemeKind::Trading: return "trading";
        case SchemeKind::Flat: return "flat";
    }
    return "?";
}

SchemeKind scheme_from_name(const std::string& name) {
    if (name == "pivot") return SchemeKind::Pivot;
    if (name == "trading") return SchemeKind::Trading;
    if (name == "flat") return SchemeKind::Flat;
    throw std::invalid_argument("unknown scheme: " + name);
}

namespace table1 {

namespace {
constexpr std::array<int, 5> kCounts{100, 125, 150, 175, 200};
constexpr std::array<double, 5> kPivot{4.0, 4.5, 4.5, 5.5, 5.5};
constexpr std::array<double, 5> kTrading{6.0, 6.0, 5.5, 5.5, 5.0};

double nearest(const std::array<double, 5>& values, int n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kCounts.size(); ++i)
        if (std::abs(n - kCounts[i]) < std::abs(n - kCounts[best])) best = i;
    return values[best];
}
} // namespace

double pivot_head_target(int n_nodes) { return nearest(kPivot, n_nodes); }
double trading_head_target(int n_nodes) { return nearest(kTrading, n_nodes); }

} // namespace table1

double SchemeSpec::resolved_head_target(int n_nodes) const {
    if (head_target) return *head_target;
    switch (kind) {
        case SchemeKind::Pivot: return table1::pivot_head_target(n_nodes);
        case SchemeKind::Trading: return table1::trading_head_target(n_nodes);
        case SchemeKind::Flat: return ets;
    }
    return ets;
}

namespace {

// Counting levels for the run series. "At target" is the service level ets
// for everyone. "Overcharged" counts prospective stage-2 energy sources:
// pivot heads at ET_p, any node at ET_h under trading, and the service level
// itself for the flat baseline.
MetricLevels build_levels(const Scenario& scenario, const SchemeSpec& spec,
                          const ClusterSet& clusters, double head_target) {
    const std::size_t n = static_cast<std::size_t>(scenario.size());
    MetricLevels levels;
    levels.at_target.assign(n, spec.ets);
    switch (spec.kind) {
        case SchemeKind::Pivot:
            levels.overcharge.assign(n, MetricLevels::kNever);
            for (const Cluster& c : clusters.clusters)
                levels.overcharge[static_cast<std::size_t>(c.head)] = head_target;
            break;
        case SchemeKind::Trading:
            levels.overcharge.assign(n, head_target);
            break;
        case SchemeKind::Flat:
            levels.overcharge.assign(n, spec.ets);
            break;
    }
    return levels;
}

Stage1Task build_stage1_task(const SchemeSpec& spec, const ClusterSet& clusters,
                             double head_target) {
    Stage1Task task;
    for (const Cluster& c : clusters.clusters) {
        task.heads.push_back(c.head);
        const bool singleton = c.members.empty();
        task.head_target.push_back(
            spec.singleton_target_ets && singleton ? spec.ets : head_target);
    }
    return task;
}

void append_stage2_series(RunResult& res, const std::vector<SeriesSample>& series) {
    double last_t = res.series.empty() ? -1.0 : res.series.back().t;
    for (const SeriesSample& s : series) {
        if (s.t <= last_t) continue;  // degenerate zero-step stage 2
        res.series.push_back(s);
        last_t = s.t;
    }
}

std::vector<SensorNode> build_nodes(const Scenario& scenario, const SchemeSpec& spec,
                                    const ClusterSet& clusters, double head_target,
                                    const std::vector<double>& energy) {
    std::vector<SensorNode> nodes(static_cast<std::size_t>(scenario.size()));
    for (int i = 0; i < scenario.size(); ++i) {
        SensorNode& n = nodes[static_cast<std::size_t>(i)];
        n.id = i;
        n.pos = scenario.positions[static_cast<std::size_t>(i)];
        n.energy = energy[static_cast<std::size_t>(i)];
        n.role = Role::Member;
        n.target = spec.ets;
    }
    if (spec.kind == SchemeKind::Flat) return nodes;
    for (const Cluster& c : clusters.clusters) {
        SensorNode& h = nodes[static_cast<std::size_t>(c.head)];
        h.role = spec.kind == SchemeKind::Pivot ? Role::PivotHead : Role::ClusterHead;
        h.target = spec.singleton_target_ets && c.members.empty() ? spec.ets : head_target;
    }
    return nodes;
}

void fold_stage2(RunResult& res, const ClusterSet& clusters, Stage2Result&& s2) {
    res.t_stage2 = s2.duration;
    res.status = s2.status;
    res.complete = s2.status == Stage2Status::Complete;
    res.unmet = std::move(s2.unmet);
    res.final_energy = std::move(s2.energy);
    for (std::size_t i = 0; i < clusters.clusters.size(); ++i)
        res.head_profile.push_back(
            {clusters.clusters[i].head, s2.head_before[i], s2.head_after[i]});
    append_stage2_series(res, s2.series);
    res.energy_transmitted += s2.energy_transmitted;
    res.energy_received += s2.energy_received;
}

} // namespace

RunResult run_scheme(const Scenario& scenario, const SchemeSpec& spec,
                     const EngineOptions& options) {
    scenario.validate();
    if (spec.kind == SchemeKind::Flat) return run_flat_baseline(scenario, spec, options);

    const double head_target = spec.resolved_head_target(scenario.size());
    const ClusterSet clusters = cluster_nodes(scenario, spec.r_cl);
    const MetricLevels levels = build_levels(scenario, spec, clusters, head_target);
    const Stage1Task task = build_stage1_task(spec, clusters, head_target);

    Stage1Options s1opt;
    s1opt.record_trajectory = options.record_trajectory;
    s1opt.sample_every = options.sample_every;
    s1opt.max_steps = options.max_steps;
    s1opt.exec = options.exec;
    s1opt.observer = options.stage1_observer;

    OptimizeResult opt =
        optimize_start(scenario, clusters, task, spec.charger, spec.prop, levels, s1opt);

    RunResult res;
    res.scheme = spec.kind;
    res.head_target = head_target;
    res.ets = spec.ets;
    res.n_clusters = clusters.head_count();
    res.start_head = opt.best_head;
    res.start = opt.best_start;
    res.starts_evaluated = opt.starts_evaluated;
    res.t_stage1 = opt.t_cm;
    res.clamped_steps = opt.result.clamped_steps;
    res.series = opt.result.series;
    res.trajectory = std::move(opt.result.trajectory);
    res.energy_transmitted = opt.result.energy_transmitted;
    res.energy_received = opt.result.energy_received;
    res.n_at_target_stage1_end = levels.count_at_target(opt.result.energy);
    res.n_overcharged_stage1_end = levels.count_overcharged(opt.result.energy);

    Stage2Config s2cfg = spec.stage2;
    if (spec.kind == SchemeKind::Trading && s2cfg.seller_threshold <= 0.0)
        s2cfg.seller_threshold = head_target;

    Stage2Options s2opt;
    s2opt.sample_every = options.sample_every;
    s2opt.max_steps = options.max_steps;
    s2opt.t_offset = res.t_stage1;
    s2opt.exec = options.exec;
    s2opt.observer = options.stage2_observer;

    if (spec.kind == SchemeKind::Pivot) {
        fold_stage2(res, clusters,
                    run_stage2_pivot(scenario, clusters, opt.result.energy, spec.ets, s2cfg,
                                     spec.prop, spec.charger.pattern, spec.charger.tx_power,
                                     levels, s2opt));
    } else {
        fold_stage2(res, clusters,
                    run_stage2_trading(scenario, clusters, opt.result.energy, spec.ets,
                                       s2cfg, spec.prop, spec.charger.tx_power, levels,
                                       s2opt));
    }

    res.t_total = res.t_stage1 + res.t_stage2;
    res.efficiency = res.energy_transmitted > 0.0
                         ? res.energy_received / res.energy_transmitted
                         : 0.0;
    res.nodes = build_nodes(scenario, spec, clusters, head_target, res.final_energy);
    res.clusters = clusters;
    return res;
}

RunResult run_flat_baseline(const Scenario& scenario, const SchemeSpec& spec,
                            const EngineOptions& options) {
    scenario.validate();
    SchemeSpec flat = spec;
    flat.kind = SchemeKind::Flat;
    flat.charger.pattern = {0.0, flat.charger.pattern.hpbw_deg, 0.0};  // omni, 0 dB

    const ClusterSet clusters = cluster_nodes(scenario, flat.r_cl);
    const MetricLevels levels = build_levels(scenario, flat, clusters, flat.ets);

    Stage1Task task;
    for (int i = 0; i < scenario.size(); ++i) {
        task.heads.push_back(i);
        task.head_target.push_back(flat.ets);
    }

    Stage1Options s1opt;
    s1opt.record_trajectory = options.record_trajectory;
    s1opt.sample_every = options.sample_every;
    s1opt.max_steps = options.max_steps;
    s1opt.exec = options.exec;
    s1opt.observer = options.stage1_observer;

    const NodeId start_head = clusters.clusters.front().head;
    const Vec2 start = scenario.positions[static_cast<std::size_t>(start_head)];
    Stage1Result r =
        run_stage1(scenario, task, start, flat.charger, flat.prop, levels,
                   std::vector<double>(static_cast<std::size_t>(scenario.size()), 0.0),
                   s1opt);

    RunResult res;
    res.scheme = SchemeKind::Flat;
    res.head_target = flat.ets;
    res.ets = flat.ets;
    res.n_clusters = clusters.head_count();
    res.start_head = start_head;
    res.start = start;
    res.starts_evaluated = 1;
    res.t_stage1 = r.t_cm;
    res.t_stage2 = 0.0;
    res.t_total = r.t_cm;
    res.status = Stage2Status::Complete;
    res.complete = true;
    res.clamped_steps = r.clamped_steps;
    res.series = std::move(r.series);
    res.trajectory = std::move(r.trajectory);
    res.n_at_target_stage1_end = levels.count_at_target(r.energy);
    res.n_overcharged_stage1_end = levels.count_overcharged(r.energy);
    res.final_energy = std::move(r.energy);
    res.energy_transmitted = r.energy_transmitted;
    res.energy_received = r.energy_received;
    res.efficiency = res.energy_transmitted > 0.0
                         ? res.energy_received / res.energy_transmitted
                         : 0.0;
    res.nodes = build_nodes(scenario, flat, clusters, flat.ets, res.final_energy);
    res.clusters = clusters;
    return res;
}

CalibrationResult calibrate_target(const Scenario& scenario, const SchemeSpec& spec,
                                   double lo, double hi, double tol,
                                   const EngineOptions& options) {
    if (!(lo < hi)) throw std::invalid_argument("calibrate_target: invalid bounds");
    if (!(tol > 0.0)) throw std::invalid_argument("calibrate_target: invalid tolerance");

    EngineOptions opts = options;
    opts.record_trajectory = false;

    CalibrationResult out;
    auto completes = [&](double target) {
        SchemeSpec s = spec;
        s.head_target = target;
        ++out.runs;
        return run_scheme(scenario, s, opts).complete;
    };

    if (!completes(hi)) {
        out.target = hi;
        out.feasible = false;
        return out;
    }
    if (completes(lo)) {
        out.target = lo;
        out.feasible = true;
        return out;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (completes(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.target = hi;
    out.feasible = true;
    return out;
}

std::vector<SummaryRow> summarize(std::span<const RunRecord> records) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    std::map<std::pair<std::string, int>, std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records) groups[{r.scheme, r.n}].push_back(&r);

    std::vector<SummaryRow> rows;
    for (const auto& [key, group] : groups) {
        SummaryRow row;
        row.scheme = key.first;
        row.n = key.second;
        row.runs = static_cast<int>(group.size());
        row.t_min = group.front()->t_total;
        row.t_max = group.front()->t_total;
        double t_sum = 0.0, over_sum = 0.0;
        int completed = 0;
        for (const RunRecord* r : group) {
            t_sum += r->t_total;
            over_sum += r->overcharged_stage1;
            row.t_min = std::min(row.t_min, r->t_total);
            row.t_max = std::max(row.t_max, r->t_total);
            if (r->complete) ++completed;
        }
        row.t_mean = t_sum / row.runs;
        row.completion_rate = static_cast<double>(completed) / row.runs;
        row.mean_overcharged_stage1 = over_sum / row.runs;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace wrsn
