#include "wrsn/model.hpp"

#include <cmath>
#include <string>

namespace wrsn {

void Scenario::validate() const {
    if (positions.empty()) throw std::invalid_argument("empty scenario");
    if (!(area_side > 0.0)) throw std::invalid_argument("area_side must be positive");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec2 p = positions[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("node " + std::to_string(i) + ": non-finite coordinate");
        if (p.x < 0.0 || p.x > area_side || p.y < 0.0 || p.y > area_side)
            throw std::invalid_argument("node " + std::to_string(i) + ": outside service area");
    }
}

PatternEval::PatternEval(const AntennaPattern& p) {
    if (!(p.hpbw_deg > 0.0)) throw std::invalid_argument("hpbw_deg must be positive");
    if (p.floor_db > p.gmax_db) throw std::invalid_argument("floor_db above gmax_db");
    gmax_db = p.gmax_db;
    floor_db = p.floor_db;
    floor_gain = db_to_linear(floor_db);
    const double hpbw = p.hpbw_deg * kDegToRad;
    quad_per_rad2 = 3.0 * (2.0 / hpbw) * (2.0 / hpbw);
    // |phi| beyond which the quadratic is at or below the floor
    const double phi_floor = std::sqrt((gmax_db - floor_db) / quad_per_rad2);
    cos_floor = phi_floor >= kPi ? -2.0 : std::cos(phi_floor);
}

double directive_gain(const AntennaPattern& pattern, double phi) {
    return PatternEval(pattern).gain_phi(normalize_angle(phi));
}

double received_power(const PropagationParams& prop, Vec2 tx, Vec2 rx) {
    return link_power(prop, nullptr, tx.x, tx.y, 1.0, 0.0, rx.x, rx.y);
}

double received_power(const PropagationParams& prop, Vec2 tx, double boresight,
                      const AntennaPattern& pattern, Vec2 rx) {
    const PatternEval pe(pattern);
    const Vec2 b = unit_vector(boresight);
    return link_power(prop, &pe, tx.x, tx.y, b.x, b.y, rx.x, rx.y);
}

double derive_tx_power(const PropagationParams& prop, double tf) {
    if (!(tf > 0.0) || tf > 1.0)
        throw std::invalid_argument("tf must be in (0, 1]");
    return prop.alpha / (prop.beta * prop.beta) / tf;
}

} // namespace wrsn
