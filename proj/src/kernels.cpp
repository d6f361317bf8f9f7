#include "wrsn/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wrsn {

namespace {

inline double receiver_sum(const EmitterField& f, double rx, double ry) {
    double sum = 0.0;
    const std::size_t m = f.size();
    for (std::size_t e = 0; e < m; ++e) {
        sum += f.activity[e] *
               link_power(*f.prop, f.pattern, f.x[e], f.y[e], f.bx[e], f.by[e], rx, ry);
    }
    return sum;
}

} // namespace

void field_power_serial(const EmitterField& field, std::span<const double> rx_x,
                        std::span<const double> rx_y, std::span<double> out) {
    const std::size_t n = rx_x.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = receiver_sum(field, rx_x[i], rx_y[i]);
}

void field_power_omp(const EmitterField& field, std::span<const double> rx_x,
                     std::span<const double> rx_y, std::span<double> out, int jobs) {
#ifdef _OPENMP
    const int n = static_cast<int>(rx_x.size());
    if (jobs <= 0) jobs = omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(jobs)
    for (int i = 0; i < n; ++i)
        out[i] = receiver_sum(field, rx_x[static_cast<std::size_t>(i)],
                              rx_y[static_cast<std::size_t>(i)]);
#else
    (void)jobs;
    field_power_serial(field, rx_x, rx_y, out);
#endif
}

void field_power(const EmitterField& field, std::span<const double> rx_x,
                 std::span<const double> rx_y, std::span<double> out,
                 const ExecConfig& exec) {
    const std::size_t work = field.size() * rx_x.size();
    if (exec.jobs == 1 || work < static_cast<std::size_t>(exec.parallel_threshold)) {
        field_power_serial(field, rx_x, rx_y, out);
    } else {
        field_power_omp(field, rx_x, rx_y, out, exec.jobs);
    }
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
#ifdef _OPENMP
    if (jobs != 1 && n > 1) {
        if (jobs <= 0) jobs = omp_get_max_threads();
        // Exceptions may not escape an OpenMP region; rethrow the
        // lowest-index one afterwards so failures stay deterministic.
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
        for (int i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
        return;
    }
#endif
    (void)jobs;
    for (int i = 0; i < n; ++i) fn(i);
}

int hardware_jobs() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace wrsn
