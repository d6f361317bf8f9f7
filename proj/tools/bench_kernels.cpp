// Benchmark of the OpenMP field kernel and run-level parallelism against the
// serial reference, verifying bit-identical results along the way.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "wrsn/engine.hpp"
#include "wrsn/io.hpp"
#include "wrsn/kernels.hpp"

using namespace wrsn;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct FieldCase {
    std::vector<double> ex, ey, ebx, eby, eact, rx, ry;
};

FieldCase make_case(int emitters, int receivers, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto u = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 100.0; };
    FieldCase c;
    for (int e = 0; e < emitters; ++e) {
        c.ex.push_back(u());
        c.ey.push_back(u());
        const double ang = u() * 0.0628;
        c.ebx.push_back(std::cos(ang));
        c.eby.push_back(std::sin(ang));
        c.eact.push_back(1.0);
    }
    for (int r = 0; r < receivers; ++r) {
        c.rx.push_back(u());
        c.ry.push_back(u());
    }
    return c;
}

void bench_field(int emitters, int receivers, int reps) {
    const FieldCase c = make_case(emitters, receivers, 42);
    const PropagationParams prop;
    const AntennaPattern ap;
    const PatternEval pe(ap);
    EmitterField field{&prop, &pe, c.ex, c.ey, c.ebx, c.eby, c.eact};

    std::vector<double> out_serial(c.rx.size()), out_omp(c.rx.size());

    double t0 = now_s();
    for (int i = 0; i < reps; ++i) field_power_serial(field, c.rx, c.ry, out_serial);
    const double t_serial = (now_s() - t0) / reps;

    t0 = now_s();
    for (int i = 0; i < reps; ++i) field_power_omp(field, c.rx, c.ry, out_omp, 0);
    const double t_omp = (now_s() - t0) / reps;

    bool identical = true;
    for (std::size_t i = 0; i < out_serial.size(); ++i)
        identical &= (out_serial[i] == out_omp[i]);

    std::printf("field %5d x %5d   serial %9.3f us   omp %9.3f us   speedup %5.2fx   %s\n",
                emitters, receivers, t_serial * 1e6, t_omp * 1e6, t_serial / t_omp,
                identical ? "bit-identical" : "MISMATCH");
}

void bench_optimize(int n_nodes) {
    const Scenario scenario = generate_scenario(n_nodes, 100.0, 7);
    SchemeSpec spec;
    spec.kind = SchemeKind::Pivot;

    const ClusterSet clusters = cluster_nodes(scenario, spec.r_cl);
    Stage1Task task;
    for (const Cluster& c : clusters.clusters) {
        task.heads.push_back(c.head);
        task.head_target.push_back(table1::pivot_head_target(n_nodes));
    }
    MetricLevels levels;
    levels.at_target.assign(scenario.positions.size(), spec.ets);
    levels.overcharge.assign(scenario.positions.size(), MetricLevels::kNever);

    Stage1Options opt;
    opt.record_trajectory = false;
    opt.record_series = false;

    opt.exec.jobs = 1;
    double t0 = now_s();
    const OptimizeResult serial =
        optimize_start(scenario, clusters, task, spec.charger, spec.prop, levels, opt);
    const double t_serial = now_s() - t0;

    opt.exec.jobs = 0;  // all hardware threads
    t0 = now_s();
    const OptimizeResult par =
        optimize_start(scenario, clusters, task, spec.charger, spec.prop, levels, opt);
    const double t_par = now_s() - t0;

    const bool identical = serial.best_head == par.best_head &&
                           serial.t_cm == par.t_cm &&
                           serial.result.energy == par.result.energy;
    std::printf(
        "optimize_start n=%3d (%2d starts)   serial %7.2f s   omp %7.2f s   speedup %4.2fx   %s\n",
        n_nodes, serial.starts_evaluated, t_serial, t_par, t_serial / t_par,
        identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", hardware_jobs());

    std::printf("-- field kernel, directional emitters --\n");
    bench_field(8, 256, 2000);
    bench_field(32, 256, 500);
    bench_field(64, 1024, 100);
    bench_field(128, 4096, 20);

    std::printf("\n-- whole stage-1 start optimization --\n");
    bench_optimize(60);
    bench_optimize(100);
    return 0;
}
