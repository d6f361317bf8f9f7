#include "wrsn/cli.hpp"

#include <fstream>
#include <iostream>

#include "wrsn/config.hpp"
#include "wrsn/io.hpp"
#include "wrsn/kernels.hpp"

namespace wrsn::cli {

namespace fs = std::filesystem;

std::string make_run_id(SchemeKind scheme, int n, std::uint64_t seed) {
    return scheme_name(scheme) + "_n" + std::to_string(n) + "_s" + std::to_string(seed);
}

std::vector<std::uint64_t> parse_seed_args(const std::vector<std::string>& args) {
    std::vector<std::uint64_t> seeds;
    for (const std::string& a : args) {
        const std::size_t dots = a.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(std::stoull(a));
            continue;
        }
        const std::uint64_t lo = std::stoull(a.substr(0, dots));
        const std::uint64_t hi = std::stoull(a.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("bad seed range: " + a);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    return seeds;
}

int cmd_gen(int n, double area, std::uint64_t seed, const fs::path& out) {
    const Scenario s = generate_scenario(n, area, seed);
    save_scenario(s, out);
    return kExitOk;
}

namespace {

SimConfig load_or_default(const std::optional<fs::path>& path) {
    return path ? load_config_file(*path) : SimConfig{};
}

EngineOptions engine_options(const SimConfig& cfg, int sample_every, int jobs) {
    EngineOptions opt;
    opt.sample_every = sample_every > 0 ? sample_every : cfg.sample_every;
    opt.max_steps = cfg.step_budget;
    opt.exec.jobs = jobs;
    return opt;
}

} // namespace

int cmd_run(const RunArgs& args) {
    const Scenario scenario = load_scenario(args.scenario);
    const SimConfig cfg = load_or_default(args.config);
    const SchemeSpec spec = cfg.to_spec(args.scheme);
    const EngineOptions opt = engine_options(cfg, args.sample_every, args.jobs);

    const RunResult result = run_scheme(scenario, spec, opt);
    const std::string run_id = make_run_id(args.scheme, scenario.size(), scenario.seed);
    write_run_artifacts(args.out, run_id, scenario, spec, result, true);

    std::cout << run_id << ": " << (result.complete ? "complete" : "stalled")
              << ", t_total=" << format_double(result.t_total)
              << " s (stage1=" << format_double(result.t_stage1)
              << ", stage2=" << format_double(result.t_stage2) << "), clusters="
              << result.n_clusters << ", efficiency=" << format_double(result.efficiency)
              << "\n";
    if (!result.complete) {
        std::cout << "  unmet nodes: " << result.unmet.size() << "\n";
        return kExitStalled;
    }
    return kExitOk;
}

int cmd_sweep(const SweepArgs& args) {
    if (args.ns.empty() || args.seeds.empty() || args.schemes.empty())
        throw std::invalid_argument("sweep needs at least one n, seed and scheme");
    const SimConfig cfg = load_or_default(args.config);

    struct Cell {
        SchemeKind scheme;
        int n;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (SchemeKind scheme : args.schemes)
        for (int n : args.ns)
            for (std::uint64_t seed : args.seeds) cells.push_back({scheme, n, seed});

    std::vector<RunRecord> records(cells.size());
    const fs::path runs_dir = args.out / "runs";

    parallel_for(static_cast<int>(cells.size()), args.jobs, [&](int idx) {
        const Cell& cell = cells[static_cast<std::size_t>(idx)];
        const std::string run_id = make_run_id(cell.scheme, cell.n, cell.seed);
        const fs::path dir = runs_dir / run_id;
        const fs::path summary_path = dir / "summary.json";

        if (fs::exists(summary_path)) {
            // resume: completed artifacts are reused as-is
            std::ifstream in(summary_path);
            nlohmann::json j;
            in >> j;
            records[static_cast<std::size_t>(idx)] = record_from_summary(j);
            return;
        }

        const Scenario scenario = generate_scenario(cell.n, args.area, cell.seed);
        const SchemeSpec spec = cfg.to_spec(cell.scheme);
        EngineOptions opt = engine_options(cfg, args.sample_every, 1);
        opt.record_trajectory = args.per_run_artifacts;
        const RunResult result = run_scheme(scenario, spec, opt);
        write_run_artifacts(dir, run_id, scenario, spec, result, args.per_run_artifacts);
        RunRecord rec;
        rec.scheme = scheme_name(cell.scheme);
        rec.n = cell.n;
        rec.seed = cell.seed;
        rec.t_total = result.t_total;
        rec.complete = result.complete;
        rec.overcharged_stage1 = result.n_overcharged_stage1_end;
        records[static_cast<std::size_t>(idx)] = rec;
    });

    const std::vector<SummaryRow> rows = summarize(records);
    atomic_write(args.out / "summary.csv", summary_rows_csv(rows));
    atomic_write(args.out / "summary.json", summary_rows_json(rows).dump(2) + "\n");
    std::cout << "sweep: " << cells.size() << " runs, " << rows.size()
              << " summary rows -> " << args.out.string() << "\n";
    return kExitOk;
}

int cmd_report(const fs::path& sweep_dir, const fs::path& out) {
    std::vector<RunRecord> records;
    const fs::path runs_dir = sweep_dir / "runs";
    if (fs::is_directory(runs_dir)) {
        std::vector<fs::path> summaries;
        for (const auto& entry : fs::directory_iterator(runs_dir)) {
            const fs::path p = entry.path() / "summary.json";
            if (fs::exists(p)) summaries.push_back(p);
        }
        std::sort(summaries.begin(), summaries.end());
        for (const fs::path& p : summaries) {
            std::ifstream in(p);
            nlohmann::json j;
            in >> j;
            records.push_back(record_from_summary(j));
        }
    }
    if (records.empty()) {
        std::cerr << "report: no run artifacts under " << runs_dir.string() << "\n";
        return kExitError;
    }
    const std::vector<SummaryRow> rows = summarize(records);
    atomic_write(out / "summary.csv", summary_rows_csv(rows));
    atomic_write(out / "summary.json", summary_rows_json(rows).dump(2) + "\n");
    std::cout << "report: " << records.size() << " runs, " << rows.size()
              << " summary rows -> " << out.string() << "\n";
    return kExitOk;
}

} // namespace wrsn::cli
