#include "wrsn/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wrsn/planner.hpp"

namespace wrsn {

namespace {

// Shared per-step state of a stage-2 loop. Both schemes differ only in who
// transmits, who harvests, and the termination predicate.
struct Stage2Loop {
    const Scenario& scenario;
    const Stage2Config& cfg;
    const Stage2Options& options;
    const MetricLevels& levels;
    double tx_power;

    std::vector<double> energy;
    std::vector<ActiveTransmitter> active;
    std::vector<double> ex, ey, ebx, eby, eact;  // emitter SoA
    std::vector<double> rx, ry;                  // receiver SoA
    std::vector<int> receiver_ids;
    std::vector<double> watts, gain_full;
    double elapsed = 0.0;
    std::int64_t steps = 0;
    double transmitted = 0.0, received = 0.0;

    // stall window bookkeeping
    double window_start = 0.0;
    std::vector<double> window_energy;
    std::size_t window_undercharged = 0;

    std::int64_t last_sampled_step = -1;
    std::vector<SeriesSample> series;

    bool field_cached = false;
    std::vector<ActiveTransmitter> cached_active;
    std::vector<int> cached_receivers;

    Stage2Loop(const Scenario& s, std::span<const double> e0, const Stage2Config& c,
               const Stage2Options& o, const MetricLevels& lv, double txp)
        : scenario(s), cfg(c), options(o), levels(lv), tx_power(txp),
          energy(e0.begin(), e0.end()) {
        window_energy = energy;
        gain_full.assign(energy.size(), 0.0);
    }

    void sample() {
        series.push_back({options.t_offset + elapsed, levels.count_at_target(energy),
                          levels.count_overcharged(energy), 2});
        last_sampled_step = steps;
    }

    // Applies one dt of the active emitters' field to the receiver set. The
    // transmitter and receiver sets persist over many steps between
    // crossings, so the field is recomputed only when either changes.
    void apply_field(const PatternEval* pattern) {
        const bool same_phase =
            field_cached &&
            std::equal(active.begin(), active.end(), cached_active.begin(),
                       cached_active.end(),
                       [](const ActiveTransmitter& a, const ActiveTransmitter& b) {
                           return a.id == b.id && a.target == b.target &&
                                  a.boresight == b.boresight && a.omni == b.omni &&
                                  a.fraction == b.fraction;
                       }) &&
            receiver_ids == cached_receivers;
        if (!same_phase) {
            const std::size_t m = active.size();
            ex.resize(m); ey.resize(m); ebx.resize(m); eby.resize(m); eact.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const Vec2 p = scenario.positions[static_cast<std::size_t>(active[i].id)];
                ex[i] = p.x;
                ey[i] = p.y;
                const Vec2 b =
                    active[i].omni ? Vec2{1.0, 0.0} : unit_vector(active[i].boresight);
                ebx[i] = b.x;
                eby[i] = b.y;
                eact[i] = active[i].fraction;
            }
            EmitterField field{prop_, pattern, ex, ey, ebx, eby, eact};
            watts.resize(rx.size());
            field_power(field, rx, ry, watts, options.exec);
            field_cached = true;
            cached_active = active;
            cached_receivers = receiver_ids;
        }

        std::fill(gain_full.begin(), gain_full.end(), 0.0);
        for (std::size_t i = 0; i < receiver_ids.size(); ++i) {
            const double g = watts[i] * cfg.dt;
            const std::size_t id = static_cast<std::size_t>(receiver_ids[i]);
            gain_full[id] = g;
            energy[id] += g;
            received += g;
        }
        // drain transmitters; the truncated final transmission lands exactly
        // on the reserve, and a full step can undershoot it only by
        // subtraction dust, which is clamped away
        for (const ActiveTransmitter& a : active) {
            const std::size_t id = static_cast<std::size_t>(a.id);
            if (a.fraction < 1.0) {
                transmitted += energy[id] - cfg.reserve;
                energy[id] = cfg.reserve;
            } else {
                transmitted += tx_power * cfg.dt;
                energy[id] -= tx_power * cfg.dt;
                if (energy[id] < cfg.reserve) energy[id] = cfg.reserve;
            }
        }
    }

    double transmit_fraction(double e) const {
        const double full = tx_power * cfg.dt;
        const double avail = e - cfg.reserve;
        return avail >= full ? 1.0 : avail / full;
    }

    void finish_step() {
        if (options.observer)
            options.observer({elapsed, active, gain_full, energy});
        elapsed += cfg.dt;
        ++steps;
        if (steps % options.sample_every == 0) sample();
    }

    // True when the current window shows progress: the undercharged set
    // shrank or some member of it gained at least stall_epsilon.
    bool window_progress(std::span<const int> undercharged_ids) {
        bool progress = undercharged_ids.size() < window_undercharged;
        for (int id : undercharged_ids) {
            if (energy[static_cast<std::size_t>(id)] -
                    window_energy[static_cast<std::size_t>(id)] >=
                cfg.stall_epsilon) {
                progress = true;
                break;
            }
        }
        window_start = elapsed;
        window_energy = energy;
        window_undercharged = undercharged_ids.size();
        return progress;
    }

    const PropagationParams* prop_ = nullptr;
};

} // namespace

std::optional<NodeId> next_target(const Scenario& scenario, const Cluster& cluster,
                                  std::span<const double> energy, double ets,
                                  OrderingPolicy policy) {
    std::optional<NodeId> best;
    double best_key = 0.0;
    const Vec2 head_pos = scenario.positions[static_cast<std::size_t>(cluster.head)];
    for (NodeId m : cluster.members) {  // ascending id: first strict winner == lowest id
        const double e = energy[static_cast<std::size_t>(m)];
        if (e >= ets) continue;
        double key = 0.0;
        switch (policy) {
            case OrderingPolicy::MaxDeficit: key = -(ets - e); break;  // most deficit first
            case OrderingPolicy::Fifo: key = static_cast<double>(m); break;
            case OrderingPolicy::Nearest:
                key = distance_sq(head_pos, scenario.positions[static_cast<std::size_t>(m)]);
                break;
        }
        if (!best || key < best_key) {
            best = m;
            best_key = key;
        }
    }
    return best;
}

Stage2Result run_stage2_pivot(const Scenario& scenario, const ClusterSet& clusters,
                              std::span<const double> energy_after_stage1, double ets,
                              const Stage2Config& cfg, const PropagationParams& prop,
                              const AntennaPattern& pattern, double tx_power,
                              const MetricLevels& levels, const Stage2Options& options) {
    const int n = scenario.size();
    const PatternEval pe(pattern);

    Stage2Loop loop(scenario, energy_after_stage1, cfg, options, levels, tx_power);
    loop.prop_ = &prop;

    std::vector<char> is_head(static_cast<std::size_t>(n), 0);
    for (const Cluster& c : clusters.clusters) is_head[static_cast<std::size_t>(c.head)] = 1;

    Stage2Result res;
    for (const Cluster& c : clusters.clusters)
        res.head_before.push_back(loop.energy[static_cast<std::size_t>(c.head)]);

    auto undercharged_ids = [&] {
        std::vector<int> ids;
        for (int i = 0; i < n; ++i)
            if (!is_head[static_cast<std::size_t>(i)] &&
                loop.energy[static_cast<std::size_t>(i)] < ets)
                ids.push_back(i);
        return ids;
    };

    loop.window_undercharged = undercharged_ids().size();
    while (true) {
        std::vector<int> uc = undercharged_ids();
        if (uc.empty()) {
            res.status = Stage2Status::Complete;
            break;
        }
        if (loop.steps >= options.max_steps)
            throw SimulationError("stage 2 (pivot) exceeded step budget at t=" +
                                  std::to_string(loop.elapsed) + " s");

        loop.active.clear();
        for (const Cluster& c : clusters.clusters) {
            const std::size_t h = static_cast<std::size_t>(c.head);
            if (loop.energy[h] <= cfg.reserve) continue;
            const std::optional<NodeId> tgt =
                next_target(scenario, c, loop.energy, ets, cfg.ordering);
            if (!tgt) continue;
            const double bore =
                bearing(scenario.positions[h], scenario.positions[static_cast<std::size_t>(*tgt)]);
            loop.active.push_back(
                {c.head, *tgt, bore, false, loop.transmit_fraction(loop.energy[h])});
        }
        if (loop.active.empty()) {
            // No head can transmit and demand remains; nothing in the model
            // can change state anymore, so this is the stall.
            res.status = Stage2Status::Stalled;
            break;
        }

        loop.rx.resize(uc.size());
        loop.ry.resize(uc.size());
        loop.receiver_ids = uc;
        for (std::size_t i = 0; i < uc.size(); ++i) {
            const Vec2 p = scenario.positions[static_cast<std::size_t>(uc[i])];
            loop.rx[i] = p.x;
            loop.ry[i] = p.y;
        }
        loop.apply_field(&pe);
        loop.finish_step();

        if (loop.elapsed - loop.window_start >= cfg.stall_window) {
            if (!loop.window_progress(undercharged_ids())) {
                res.status = Stage2Status::Stalled;
                break;
            }
        }
    }

    if (loop.last_sampled_step != loop.steps) loop.sample();
    res.duration = loop.elapsed;
    res.steps = loop.steps;
    for (int id : undercharged_ids())
        res.unmet.push_back({id, ets - loop.energy[static_cast<std::size_t>(id)]});
    for (const Cluster& c : clusters.clusters)
        res.head_after.push_back(loop.energy[static_cast<std::size_t>(c.head)]);
    res.energy = std::move(loop.energy);
    res.series = std::move(loop.series);
    res.energy_transmitted = loop.transmitted;
    res.energy_received = loop.received;
    return res;
}

Stage2Result run_stage2_trading(const Scenario& scenario, const ClusterSet& clusters,
                                std::span<const double> energy_after_stage1, double ets,
                                const Stage2Config& cfg, const PropagationParams& prop,
                                double tx_power, const MetricLevels& levels,
                                const Stage2Options& options) {
    const int n = scenario.size();
    const double threshold = cfg.seller_threshold;

    Stage2Loop loop(scenario, energy_after_stage1, cfg, options, levels, tx_power);
    loop.prop_ = &prop;

    Stage2Result res;
    for (const Cluster& c : clusters.clusters)
        res.head_before.push_back(loop.energy[static_cast<std::size_t>(c.head)]);

    std::vector<char> seller(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        if (loop.energy[static_cast<std::size_t>(i)] >= threshold)
            seller[static_cast<std::size_t>(i)] = 1;

    // buyers: non-sellers still below the seller threshold; they harvest and
    // may cross it, joining the seller side
    auto buyer_ids = [&] {
        std::vector<int> ids;
        for (int i = 0; i < n; ++i)
            if (!seller[static_cast<std::size_t>(i)] &&
                loop.energy[static_cast<std::size_t>(i)] < threshold)
                ids.push_back(i);
        return ids;
    };
    auto service_unmet_ids = [&] {
        std::vector<int> ids;
        for (int i = 0; i < n; ++i)
            if (!seller[static_cast<std::size_t>(i)] &&
                loop.energy[static_cast<std::size_t>(i)] < ets)
                ids.push_back(i);
        return ids;
    };

    loop.window_undercharged = service_unmet_ids().size();
    while (true) {
        if (service_unmet_ids().empty()) {
            res.status = Stage2Status::Complete;
            break;
        }
        if (loop.steps >= options.max_steps)
            throw SimulationError("stage 2 (trading) exceeded step budget at t=" +
                                  std::to_string(loop.elapsed) + " s");

        const std::vector<int> buyers = buyer_ids();
        loop.active.clear();
        const double sr2 = cfg.serve_radius * cfg.serve_radius;
        for (int s = 0; s < n; ++s) {
            const std::size_t si = static_cast<std::size_t>(s);
            if (!seller[si] || loop.energy[si] <= cfg.reserve) continue;
            bool near_buyer = false;
            for (int b : buyers) {
                if (distance_sq(scenario.positions[si],
                                scenario.positions[static_cast<std::size_t>(b)]) <= sr2) {
                    near_buyer = true;
                    break;
                }
            }
            if (!near_buyer) continue;
            loop.active.push_back({s, -1, 0.0, true, loop.transmit_fraction(loop.energy[si])});
        }
        if (loop.active.empty()) {
            res.status = Stage2Status::Stalled;
            break;
        }

        loop.rx.resize(buyers.size());
        loop.ry.resize(buyers.size());
        loop.receiver_ids = buyers;
        for (std::size_t i = 0; i < buyers.size(); ++i) {
            const Vec2 p = scenario.positions[static_cast<std::size_t>(buyers[i])];
            loop.rx[i] = p.x;
            loop.ry[i] = p.y;
        }
        loop.apply_field(nullptr);

        // state transitions happen on step boundaries
        for (int b : buyers)
            if (loop.energy[static_cast<std::size_t>(b)] >= threshold)
                seller[static_cast<std::size_t>(b)] = 1;
        for (int s = 0; s < n; ++s)
            if (seller[static_cast<std::size_t>(s)] &&
                loop.energy[static_cast<std::size_t>(s)] <= cfg.reserve)
                seller[static_cast<std::size_t>(s)] = 0;

        loop.finish_step();

        if (loop.elapsed - loop.window_start >= cfg.stall_window) {
            if (!loop.window_progress(service_unmet_ids())) {
                res.status = Stage2Status::Stalled;
                break;
            }
        }
    }

    if (loop.last_sampled_step != loop.steps) loop.sample();
    res.duration = loop.elapsed;
    res.steps = loop.steps;
    for (int id : service_unmet_ids())
        res.unmet.push_back({id, ets - loop.energy[static_cast<std::size_t>(id)]});
    for (const Cluster& c : clusters.clusters)
        res.head_after.push_back(loop.energy[static_cast<std::size_t>(c.head)]);
    res.energy = std::move(loop.energy);
    res.series = std::move(loop.series);
    res.energy_transmitted = loop.transmitted;
    res.energy_received = loop.received;
    return res;
}

} // namespace wrsn
