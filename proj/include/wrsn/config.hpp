#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "wrsn/engine.hpp"

namespace wrsn {

// Run configuration file (JSON). Every key is optional and defaults to the
// values below; unknown keys are rejected. Angles are degrees here and only
// here; the simulator works in radians.
struct SimConfig {
    PropagationParams prop{};
    double tf = 0.02;              // d=0 received/transmit power ratio
    bool tf_includes_gain = false; // include the transmit gain in that ratio
    AntennaPattern antenna{};
    double charger_dt = 0.0025;
    double charger_step_len = 0.05;
    double sector_half_angle_deg = 22.0;
    Stage2Config stage2{};
    double ets = 2.0;
    std::optional<double> head_target;  // empty => table lookup by node count
    double r_cl = 10.0;
    bool singleton_target_ets = false;
    int sample_every = 100;
    std::int64_t step_budget = 100000000;

    double tx_power() const;
    SchemeSpec to_spec(SchemeKind kind) const;
};

SimConfig config_from_json(const nlohmann::json& j);
SimConfig load_config_file(const std::filesystem::path& path);

} // namespace wrsn
