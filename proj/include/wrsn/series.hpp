#pragma once

#include <limits>
#include <vector>

namespace wrsn {

// One sampled point of the run metrics. n_at_target counts nodes at or above
// the service level ET_s; n_overcharged counts nodes holding at least the
// level that makes them an energy source under the active scheme.
struct SeriesSample {
    double t = 0.0;
    int n_at_target = 0;
    int n_overcharged = 0;
    int stage = 0;
};

// Per-node counting levels used by the samplers. An overcharge level of
// +infinity excludes the node from the overcharged counter.
struct MetricLevels {
    std::vector<double> at_target;
    std::vector<double> overcharge;

    static constexpr double kNever = std::numeric_limits<double>::infinity();

    int count_at_target(const std::vector<double>& energy) const {
        int c = 0;
        for (std::size_t i = 0; i < energy.size(); ++i)
            if (energy[i] >= at_target[i]) ++c;
        return c;
    }
    int count_overcharged(const std::vector<double>& energy) const {
        int c = 0;
        for (std::size_t i = 0; i < energy.size(); ++i)
            if (energy[i] >= overcharge[i]) ++c;
        return c;
    }
};

} // namespace wrsn
