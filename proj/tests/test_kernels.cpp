#include <random>

#include "doctest.h"
#include "wrsn/engine.hpp"
#include "wrsn/io.hpp"
#include "wrsn/kernels.hpp"

using namespace wrsn;

namespace {

struct FieldData {
    std::vector<double> ex, ey, ebx, eby, act, rx, ry;
};

FieldData random_field(int emitters, int receivers, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> coord(0.0, 100.0), ang(-kPi, kPi),
        frac(0.1, 1.0);
    FieldData f;
    for (int e = 0; e < emitters; ++e) {
        f.ex.push_back(coord(gen));
        f.ey.push_back(coord(gen));
        const double a = ang(gen);
        f.ebx.push_back(std::cos(a));
        f.eby.push_back(std::sin(a));
        f.act.push_back(frac(gen));
    }
    for (int r = 0; r < receivers; ++r) {
        f.rx.push_back(coord(gen));
        f.ry.push_back(coord(gen));
    }
    return f;
}

} // namespace

TEST_CASE("field kernel: OpenMP variant is bit-identical to the serial reference") {
    const PropagationParams prop;
    const AntennaPattern ap;
    const PatternEval pe(ap);

    for (int trial = 0; trial < 5; ++trial) {
        const FieldData f = random_field(3 + trial * 7, 50 + trial * 40, 100 + trial);
        std::vector<double> serial(f.rx.size()), omp2(f.rx.size()), omp4(f.rx.size());

        // directional emitters
        EmitterField field{&prop, &pe, f.ex, f.ey, f.ebx, f.eby, f.act};
        field_power_serial(field, f.rx, f.ry, serial);
        field_power_omp(field, f.rx, f.ry, omp2, 2);
        field_power_omp(field, f.rx, f.ry, omp4, 4);
        CHECK(serial == omp2);
        CHECK(serial == omp4);

        // omni emitters
        EmitterField omni{&prop, nullptr, f.ex, f.ey, f.ebx, f.eby, f.act};
        field_power_serial(omni, f.rx, f.ry, serial);
        field_power_omp(omni, f.rx, f.ry, omp4, 4);
        CHECK(serial == omp4);
    }
}

TEST_CASE("field kernel: single emitter matches received_power") {
    const PropagationParams prop;
    const AntennaPattern ap;
    const PatternEval pe(ap);
    std::mt19937_64 gen(55);
    std::uniform_real_distribution<double> coord(0.0, 100.0), ang(-kPi, kPi);

    for (int i = 0; i < 100; ++i) {
        const Vec2 tx{coord(gen), coord(gen)};
        const Vec2 rx{coord(gen), coord(gen)};
        const double bore = ang(gen);
        const Vec2 u = unit_vector(bore);
        const double act = 1.0;
        std::vector<double> out(1);
        EmitterField field{&prop, &pe, {&tx.x, 1}, {&tx.y, 1}, {&u.x, 1}, {&u.y, 1},
                           {&act, 1}};
        field_power_serial(field, {&rx.x, 1}, {&rx.y, 1}, out);
        CHECK(out[0] == received_power(prop, tx, bore, ap, rx));
    }
}

TEST_CASE("parallel_for") {
    SUBCASE("results keyed by index are job-count independent") {
        std::vector<double> a(200), b(200);
        parallel_for(200, 1, [&](int i) { a[(std::size_t)i] = std::sin(i) * i; });
        parallel_for(200, 4, [&](int i) { b[(std::size_t)i] = std::sin(i) * i; });
        CHECK(a == b);
    }
    SUBCASE("exceptions propagate") {
        CHECK_THROWS_AS(parallel_for(8, 4,
                                     [](int i) {
                                         if (i == 3) throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
    }
}

TEST_CASE("optimize_start is job-count independent") {
    const Scenario s = generate_scenario(24, 70.0, 77);
    const ClusterSet clusters = cluster_nodes(s, 10.0);
    Stage1Task task;
    for (const Cluster& c : clusters.clusters) {
        task.heads.push_back(c.head);
        task.head_target.push_back(3.0);
    }
    MetricLevels levels;
    levels.at_target.assign(s.positions.size(), 2.0);
    levels.overcharge.assign(s.positions.size(), 3.0);

    Stage1Options opt;
    opt.exec.jobs = 1;
    const OptimizeResult serial =
        optimize_start(s, clusters, task, ChargerConfig{}, PropagationParams{}, levels, opt);
    opt.exec.jobs = 4;
    const OptimizeResult par =
        optimize_start(s, clusters, task, ChargerConfig{}, PropagationParams{}, levels, opt);

    CHECK(serial.best_head == par.best_head);
    CHECK(serial.t_cm == par.t_cm);
    CHECK(serial.result.energy == par.result.energy);
    CHECK(serial.result.trajectory.size() == par.result.trajectory.size());
}

TEST_CASE("full runs are job-count independent") {
    const Scenario s = generate_scenario(26, 60.0, 13);
    SchemeSpec spec;
    spec.kind = SchemeKind::Pivot;
    spec.head_target = 5.0;

    EngineOptions o1, o4;
    o1.exec.jobs = 1;
    o4.exec.jobs = 4;
    const std::string a = summary_to_json("x", s, spec, run_scheme(s, spec, o1)).dump();
    const std::string b = summary_to_json("x", s, spec, run_scheme(s, spec, o4)).dump();
    CHECK(a == b);
}
