#include "wrsn/io.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <stdexcept>
#include <system_error>

namespace wrsn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= (key == a);
        if (!ok) throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
}

} // namespace

Scenario generate_scenario(int n, double area_side, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("empty scenario");
    if (!(area_side > 0.0)) throw std::invalid_argument("area must be positive");
    std::mt19937_64 gen(seed);
    auto u01 = [&gen] {
        // top 53 bits, exact on every platform
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    Scenario s;
    s.area_side = area_side;
    s.seed = seed;
    s.positions.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = u01() * area_side;
        const double y = u01() * area_side;
        s.positions.push_back({x, y});
    }
    return s;
}

ordered_json scenario_to_json(const Scenario& scenario) {
    ordered_json j;
    j["format"] = "wrsn-scenario-v1";
    j["area_side_m"] = scenario.area_side;
    j["seed"] = scenario.seed;
    ordered_json nodes = ordered_json::array();
    for (int i = 0; i < scenario.size(); ++i) {
        const Vec2 p = scenario.positions[static_cast<std::size_t>(i)];
        nodes.push_back({{"id", i}, {"x_m", p.x}, {"y_m", p.y}});
    }
    j["nodes"] = std::move(nodes);
    return j;
}

Scenario scenario_from_json(const json& j) {
    reject_unknown_keys(j, {"format", "area_side_m", "seed", "nodes"}, "scenario");
    if (j.at("format").get<std::string>() != "wrsn-scenario-v1")
        throw std::invalid_argument("unsupported scenario format");
    Scenario s;
    s.area_side = j.at("area_side_m").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    const json& nodes = j.at("nodes");
    s.positions.resize(nodes.size());
    std::vector<char> seen(nodes.size(), 0);
    for (const json& node : nodes) {
        reject_unknown_keys(node, {"id", "x_m", "y_m"}, "scenario node");
        const long long id = node.at("id").get<long long>();
        if (id < 0 || id >= static_cast<long long>(nodes.size()) ||
            seen[static_cast<std::size_t>(id)])
            throw std::invalid_argument("node ids must be unique and contiguous from 0");
        seen[static_cast<std::size_t>(id)] = 1;
        s.positions[static_cast<std::size_t>(id)] = {node.at("x_m").get<double>(),
                                                     node.at("y_m").get<double>()};
    }
    s.validate();
    return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    atomic_write(path, scenario_to_json(scenario).dump(2) + "\n");
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
    json j;
    in >> j;
    return scenario_from_json(j);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string series_csv(const std::string& run_id, const std::vector<SeriesSample>& series) {
    std::string out = "run_id,t_s,n_at_target,n_overcharged,stage\n";
    for (const SeriesSample& s : series) {
        out += run_id;
        out += ',';
        out += format_double(s.t);
        out += ',';
        out += std::to_string(s.n_at_target);
        out += ',';
        out += std::to_string(s.n_overcharged);
        out += ',';
        out += std::to_string(s.stage);
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory) {
    std::string out = "t_s,x_m,y_m,bearing_rad,action\n";
    for (const TrajectoryPoint& p : trajectory) {
        out += format_double(p.t);
        out += ',';
        out += format_double(p.pos.x);
        out += ',';
        out += format_double(p.pos.y);
        out += ',';
        out += format_double(p.bearing);
        out += ',';
        out += p.kind == ActionKind::Move ? "move" : "stay";
        out += '\n';
    }
    return out;
}

std::string heads_csv(const std::vector<HeadProfile>& profiles) {
    std::string out = "head_id,e_before_j,e_after_j\n";
    for (const HeadProfile& h : profiles) {
        out += std::to_string(h.head);
        out += ',';
        out += format_double(h.before);
        out += ',';
        out += format_double(h.after);
        out += '\n';
    }
    return out;
}

ordered_json spec_to_json(const SchemeSpec& spec) {
    ordered_json j;
    j["scheme"] = scheme_name(spec.kind);
    j["ets_j"] = spec.ets;
    if (spec.head_target)
        j["head_target_j"] = *spec.head_target;
    else
        j["head_target_j"] = nullptr;
    j["r_cl_m"] = spec.r_cl;
    j["singleton_target_ets"] = spec.singleton_target_ets;
    j["propagation"] = {{"alpha", spec.prop.alpha}, {"beta", spec.prop.beta}};
    j["antenna"] = {{"gmax_db", spec.charger.pattern.gmax_db},
                    {"hpbw_deg", spec.charger.pattern.hpbw_deg},
                    {"floor_db", spec.charger.pattern.floor_db}};
    j["charger"] = {{"dt_s", spec.charger.dt},
                    {"step_len_m", spec.charger.step_len},
                    {"sector_half_angle_rad", spec.charger.sector_half_angle},
                    {"tx_power_w", spec.charger.tx_power}};
    const char* ordering = spec.stage2.ordering == OrderingPolicy::MaxDeficit ? "max_deficit"
                           : spec.stage2.ordering == OrderingPolicy::Fifo     ? "fifo"
                                                                              : "nearest";
    j["stage2"] = {{"dt_s", spec.stage2.dt},
                   {"ordering", ordering},
                   {"reserve_j", spec.stage2.reserve},
                   {"seller_threshold_j", spec.stage2.seller_threshold},
                   {"serve_radius_m", spec.stage2.serve_radius},
                   {"stall_window_s", spec.stage2.stall_window},
                   {"stall_epsilon_j", spec.stage2.stall_epsilon}};
    return j;
}

SchemeSpec spec_from_json(const json& j) {
    SchemeSpec spec;
    spec.kind = scheme_from_name(j.at("scheme").get<std::string>());
    spec.ets = j.at("ets_j").get<double>();
    if (!j.at("head_target_j").is_null())
        spec.head_target = j.at("head_target_j").get<double>();
    spec.r_cl = j.at("r_cl_m").get<double>();
    spec.singleton_target_ets = j.at("singleton_target_ets").get<bool>();
    const json& prop = j.at("propagation");
    spec.prop.alpha = prop.at("alpha").get<double>();
    spec.prop.beta = prop.at("beta").get<double>();
    const json& ant = j.at("antenna");
    spec.charger.pattern.gmax_db = ant.at("gmax_db").get<double>();
    spec.charger.pattern.hpbw_deg = ant.at("hpbw_deg").get<double>();
    spec.charger.pattern.floor_db = ant.at("floor_db").get<double>();
    const json& ch = j.at("charger");
    spec.charger.dt = ch.at("dt_s").get<double>();
    spec.charger.step_len = ch.at("step_len_m").get<double>();
    spec.charger.sector_half_angle = ch.at("sector_half_angle_rad").get<double>();
    spec.charger.tx_power = ch.at("tx_power_w").get<double>();
    const json& s2 = j.at("stage2");
    spec.stage2.dt = s2.at("dt_s").get<double>();
    const std::string ordering = s2.at("ordering").get<std::string>();
    spec.stage2.ordering = ordering == "max_deficit" ? OrderingPolicy::MaxDeficit
                           : ordering == "fifo"      ? OrderingPolicy::Fifo
                                                     : OrderingPolicy::Nearest;
    spec.stage2.reserve = s2.at("reserve_j").get<double>();
    spec.stage2.seller_threshold = s2.at("seller_threshold_j").get<double>();
    spec.stage2.serve_radius = s2.at("serve_radius_m").get<double>();
    spec.stage2.stall_window = s2.at("stall_window_s").get<double>();
    spec.stage2.stall_epsilon = s2.at("stall_epsilon_j").get<double>();
    return spec;
}

ordered_json summary_to_json(const std::string& run_id, const Scenario& scenario,
                             const SchemeSpec& spec, const RunResult& result) {
    ordered_json j;
    j["run_id"] = run_id;
    j["scheme"] = scheme_name(result.scheme);
    j["n"] = scenario.size();
    j["seed"] = scenario.seed;
    j["status"] = result.complete ? "complete" : "stalled";
    j["t_stage1_s"] = result.t_stage1;
    j["t_stage2_s"] = result.t_stage2;
    j["t_total_s"] = result.t_total;
    j["head_target_j"] = result.head_target;
    j["ets_j"] = result.ets;
    j["n_clusters"] = result.n_clusters;
    j["start_head"] = result.start_head;
    j["start"] = {{"x_m", result.start.x}, {"y_m", result.start.y}};
    j["starts_evaluated"] = result.starts_evaluated;
    j["n_at_target_stage1_end"] = result.n_at_target_stage1_end;
    j["n_overcharged_stage1_end"] = result.n_overcharged_stage1_end;
    j["clamped_steps"] = result.clamped_steps;
    j["efficiency"] = result.efficiency;
    j["energy_transmitted_j"] = result.energy_transmitted;
    j["energy_received_j"] = result.energy_received;
    ordered_json unmet = ordered_json::array();
    for (const auto& [id, deficit] : result.unmet)
        unmet.push_back({{"id", id}, {"deficit_j", deficit}});
    j["unmet"] = std::move(unmet);
    ordered_json nodes = ordered_json::array();
    for (const SensorNode& n : result.nodes) {
        const char* role = n.role == Role::PivotHead     ? "pivot_head"
                           : n.role == Role::ClusterHead ? "cluster_head"
                                                         : "member";
        nodes.push_back({{"id", n.id},
                         {"role", role},
                         {"target_j", n.target},
                         {"energy_j", n.energy}});
    }
    j["nodes"] = std::move(nodes);
    ordered_json clusters = ordered_json::array();
    for (const Cluster& c : result.clusters.clusters)
        clusters.push_back({{"head", c.head}, {"members", c.members}});
    j["clusters"] = std::move(clusters);
    j["config"] = spec_to_json(spec);
    j["scenario"] = scenario_to_json(scenario);
    return j;
}

RunRecord record_from_summary(const json& summary) {
    RunRecord r;
    r.scheme = summary.at("scheme").get<std::string>();
    r.n = summary.at("n").get<int>();
    r.seed = summary.at("seed").get<std::uint64_t>();
    r.t_total = summary.at("t_total_s").get<double>();
    r.complete = summary.at("status").get<std::string>() == "complete";
    r.overcharged_stage1 = summary.at("n_overcharged_stage1_end").get<int>();
    return r;
}

std::string summary_rows_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "scheme,n,runs,t_total_mean_s,t_total_min_s,t_total_max_s,completion_rate,"
        "mean_overcharged_stage1\n";
    for (const SummaryRow& r : rows) {
        out += r.scheme;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.runs);
        out += ',';
        out += format_double(r.t_mean);
        out += ',';
        out += format_double(r.t_min);
        out += ',';
        out += format_double(r.t_max);
        out += ',';
        out += format_double(r.completion_rate);
        out += ',';
        out += format_double(r.mean_overcharged_stage1);
        out += '\n';
    }
    return out;
}

ordered_json summary_rows_json(const std::vector<SummaryRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const SummaryRow& r : rows)
        arr.push_back({{"scheme", r.scheme},
                       {"n", r.n},
                       {"runs", r.runs},
                       {"t_total_mean_s", r.t_mean},
                       {"t_total_min_s", r.t_min},
                       {"t_total_max_s", r.t_max},
                       {"completion_rate", r.completion_rate},
                       {"mean_overcharged_stage1", r.mean_overcharged_stage1}});
    return arr;
}

void write_run_artifacts(const std::filesystem::path& dir, const std::string& run_id,
                         const Scenario& scenario, const SchemeSpec& spec,
                         const RunResult& result, bool with_csv) {
    std::filesystem::create_directories(dir);
    if (with_csv) {
        atomic_write(dir / "series.csv", series_csv(run_id, result.series));
        atomic_write(dir / "trajectory.csv", trajectory_csv(result.trajectory));
        atomic_write(dir / "heads.csv", heads_csv(result.head_profile));
    }
    atomic_write(dir / "summary.json",
                 summary_to_json(run_id, scenario, spec, result).dump(2) + "\n");
}

} // namespace wrsn
