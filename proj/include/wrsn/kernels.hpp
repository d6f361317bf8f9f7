#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wrsn/model.hpp"

namespace wrsn {

// Execution policy for the data-parallel pieces. jobs == 1 forces the serial
// reference path; jobs == 0 uses the OpenMP default thread count. Work
// smaller than parallel_threshold (emitters x receivers) stays serial even
// when jobs allow more.
struct ExecConfig {
    int jobs = 1;
    int parallel_threshold = 8192;
};

// A batch of simultaneously active transmitters, struct-of-arrays. Boresights
// are unit vectors; activity is the duty fraction of the step in [0, 1].
// pattern == nullptr means omni emitters.
struct EmitterField {
    const PropagationParams* prop = nullptr;
    const PatternEval* pattern = nullptr;
    std::span<const double> x, y;
    std::span<const double> bx, by;
    std::span<const double> activity;

    std::size_t size() const { return x.size(); }
};

// out[i] = sum_e activity[e] * link_power(e -> receiver i), in watts.
// Receivers are independent and each receiver sums emitters in index order,
// so the OpenMP variant is bit-identical to the serial reference at any
// thread count.
void field_power_serial(const EmitterField& field, std::span<const double> rx_x,
                        std::span<const double> rx_y, std::span<double> out);
void field_power_omp(const EmitterField& field, std::span<const double> rx_x,
                     std::span<const double> rx_y, std::span<double> out, int jobs);
void field_power(const EmitterField& field, std::span<const double> rx_x,
                 std::span<const double> rx_y, std::span<double> out,
                 const ExecConfig& exec);

// Run-level parallel map over [0, n). Iterations must be independent; results
// keyed by index stay deterministic at any job count.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

int hardware_jobs();

} // namespace wrsn
