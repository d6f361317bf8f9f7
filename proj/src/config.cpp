#include "wrsn/config.hpp"

#include <fstream>

namespace wrsn {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= (key == a);
        if (!ok) throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

double SimConfig::tx_power() const {
    double p = derive_tx_power(prop, tf);
    if (tf_includes_gain) p *= db_to_linear(antenna.gmax_db);
    return p;
}

SchemeSpec SimConfig::to_spec(SchemeKind kind) const {
    SchemeSpec spec;
    spec.kind = kind;
    spec.ets = ets;
    spec.head_target = head_target;
    spec.r_cl = r_cl;
    spec.prop = prop;
    spec.singleton_target_ets = singleton_target_ets;
    spec.charger.dt = charger_dt;
    spec.charger.step_len = charger_step_len;
    spec.charger.sector_half_angle = sector_half_angle_deg * kDegToRad;
    spec.charger.pattern = antenna;
    spec.charger.tx_power = tx_power();
    spec.stage2 = stage2;
    return spec;
}

SimConfig config_from_json(const json& j) {
    reject_unknown(j,
                   {"propagation", "antenna", "charger", "stage2", "targets", "run"},
                   "config");
    SimConfig c;
    if (j.contains("propagation")) {
        const json& p = j.at("propagation");
        reject_unknown(p, {"alpha", "beta", "tf", "tf_includes_gain"}, "propagation");
        maybe(p, "alpha", c.prop.alpha);
        maybe(p, "beta", c.prop.beta);
        maybe(p, "tf", c.tf);
        maybe(p, "tf_includes_gain", c.tf_includes_gain);
        if (!(c.prop.alpha > 0.0) || !(c.prop.beta > 0.0))
            throw std::invalid_argument("propagation: alpha and beta must be positive");
    }
    if (j.contains("antenna")) {
        const json& a = j.at("antenna");
        reject_unknown(a, {"gmax_db", "hpbw_deg", "floor_db"}, "antenna");
        maybe(a, "gmax_db", c.antenna.gmax_db);
        maybe(a, "hpbw_deg", c.antenna.hpbw_deg);
        maybe(a, "floor_db", c.antenna.floor_db);
    }
    if (j.contains("charger")) {
        const json& ch = j.at("charger");
        reject_unknown(ch, {"dt_s", "step_len_m", "sector_half_angle_deg"}, "charger");
        maybe(ch, "dt_s", c.charger_dt);
        maybe(ch, "step_len_m", c.charger_step_len);
        maybe(ch, "sector_half_angle_deg", c.sector_half_angle_deg);
        if (!(c.charger_dt > 0.0)) throw std::invalid_argument("charger: dt_s must be positive");
        if (c.charger_step_len < 0.0)
            throw std::invalid_argument("charger: step_len_m must be non-negative");
    }
    if (j.contains("stage2")) {
        const json& s = j.at("stage2");
        reject_unknown(s,
                       {"dt_s", "ordering", "reserve_j", "seller_threshold_j",
                        "serve_radius_m", "stall_window_s", "stall_epsilon_j"},
                       "stage2");
        maybe(s, "dt_s", c.stage2.dt);
        if (s.contains("ordering")) {
            const std::string o = s.at("ordering").get<std::string>();
            if (o == "max_deficit")
                c.stage2.ordering = OrderingPolicy::MaxDeficit;
            else if (o == "fifo")
                c.stage2.ordering = OrderingPolicy::Fifo;
            else if (o == "nearest")
                c.stage2.ordering = OrderingPolicy::Nearest;
            else
                throw std::invalid_argument("stage2: unknown ordering '" + o + "'");
        }
        maybe(s, "reserve_j", c.stage2.reserve);
        maybe(s, "seller_threshold_j", c.stage2.seller_threshold);
        maybe(s, "serve_radius_m", c.stage2.serve_radius);
        maybe(s, "stall_window_s", c.stage2.stall_window);
        maybe(s, "stall_epsilon_j", c.stage2.stall_epsilon);
        if (c.stage2.reserve < 0.0)
            throw std::invalid_argument("stage2: reserve_j must be non-negative");
        if (!(c.stage2.dt > 0.0)) throw std::invalid_argument("stage2: dt_s must be positive");
    }
    if (j.contains("targets")) {
        const json& t = j.at("targets");
        reject_unknown(t, {"ets_j", "head_target_j", "r_cl_m", "singleton_target_ets"},
                       "targets");
        maybe(t, "ets_j", c.ets);
        if (t.contains("head_target_j") && !t.at("head_target_j").is_null())
            c.head_target = t.at("head_target_j").get<double>();
        maybe(t, "r_cl_m", c.r_cl);
        maybe(t, "singleton_target_ets", c.singleton_target_ets);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        reject_unknown(r, {"sample_every", "step_budget"}, "run");
        maybe(r, "sample_every", c.sample_every);
        maybe(r, "step_budget", c.step_budget);
        if (c.sample_every <= 0)
            throw std::invalid_argument("run: sample_every must be positive");
    }
    return c;
}

SimConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    json j;
    in >> j;
    return config_from_json(j);
}

} // namespace wrsn
