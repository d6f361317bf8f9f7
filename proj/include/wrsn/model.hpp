#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wrsn/geometry.hpp"

namespace wrsn {

using NodeId = std::int32_t;

enum class Role { PivotHead, ClusterHead, Member };

struct Scenario {
    double area_side = 100.0;     // square service area side, meters
    std::uint64_t seed = 0;       // placement seed, recorded for reproducibility
    std::vector<Vec2> positions;  // node id == index, contiguous from 0

    int size() const { return static_cast<int>(positions.size()); }
    void validate() const;  // throws std::invalid_argument on bad coordinates
};

struct SensorNode {
    NodeId id = 0;
    Vec2 pos;
    double energy = 0.0;  // joules
    Role role = Role::Member;
    double target = 0.0;  // joules, set by role and scheme
};

// Composite propagation model p = alpha / (d + beta)^2. alpha folds transmit
// power, reference antenna gains, rectifier efficiency, wavelength and
// polarization loss into a single constant; the constituents are not
// represented individually.
struct PropagationParams {
    double alpha = 36.0;  // W * m^2
    double beta = 30.0;   // m
};

// Main lobe rolls off quadratically in dB and clips at a back/side-lobe
// floor: G_dB(phi) = max(floor_db, gmax_db - 3 * (2*phi/hpbw)^2).
// Peak at boresight, exactly -3 dB at +-hpbw/2.
struct AntennaPattern {
    double gmax_db = 12.0;
    double hpbw_deg = 44.0;  // full width between the half-power points
    double floor_db = -10.0;
};

inline constexpr double kDbToLn = 0.23025850929940456840179914546844;  // ln(10)/10

inline double db_to_linear(double db) { return std::exp(db * kDbToLn); }

// Linear gain at off-boresight angle phi (radians, any value; wrapped
// internally). Even in phi, non-increasing in |phi| down to the floor.
double directive_gain(const AntennaPattern& pattern, double phi);

// Pattern constants precomputed for per-step field evaluation. gain_*()
// results match directive_gain() on the same geometry.
struct PatternEval {
    double gmax_db = 0.0;
    double floor_db = 0.0;
    double floor_gain = 1.0;
    double quad_per_rad2 = 0.0;  // dB drop per rad^2: 3 * (2/hpbw)^2
    double cos_floor = 2.0;      // cos(phi) at or below this is provably floor

    PatternEval() = default;
    explicit PatternEval(const AntennaPattern& p);

    double gain_phi(double phi) const {
        const double db = std::max(floor_db, gmax_db - quad_per_rad2 * phi * phi);
        return db_to_linear(db);
    }
    // cos_phi is the cosine of the off-boresight angle.
    double gain_cos(double cos_phi) const {
        if (cos_phi <= cos_floor) return floor_gain;
        const double phi = std::acos(std::clamp(cos_phi, -1.0, 1.0));
        return gain_phi(phi);
    }
};

// One RF link. Boresight is carried as a unit vector (bx, by); pat == nullptr
// means an omni transmitter. Every energy transfer in the simulator goes
// through this function.
inline double link_power(const PropagationParams& prop, const PatternEval* pat,
                         double tx_x, double tx_y, double bx, double by,
                         double rx_x, double rx_y) {
    const double dx = rx_x - tx_x;
    const double dy = rx_y - tx_y;
    const double d = std::sqrt(dx * dx + dy * dy);
    double g = 1.0;
    if (pat != nullptr) {
        if (d == 0.0) {
            // coincident nodes: bearing convention 0, so phi = -boresight
            g = pat->gain_phi(std::atan2(by, bx));
        } else {
            g = pat->gain_cos((dx * bx + dy * by) / d);
        }
    }
    const double r = d + prop.beta;
    return g * prop.alpha / (r * r);
}

// Omni transmitter: p = alpha / (d + beta)^2.
double received_power(const PropagationParams& prop, Vec2 tx, Vec2 rx);

// Directional transmitter beaming along `boresight`.
double received_power(const PropagationParams& prop, Vec2 tx, double boresight,
                      const AntennaPattern& pattern, Vec2 rx);

// Power drained per second by a transmitting node, from the efficiency ratio
// tf = (received power at d=0) / (transmit power). The d=0 ratio excludes
// directive gain: the pattern multiplies alpha/(d+beta)^2 separately.
double derive_tx_power(const PropagationParams& prop, double tf);

} // namespace wrsn
