#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wrsn/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"wrsn: two-stage RF charging simulator for sensor networks"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random scenario file");
    int gen_n = 100;
    double gen_area = 100.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "scenario.json";
    gen->add_option("--n", gen_n, "Number of sensor nodes")->capture_default_str();
    gen->add_option("--area", gen_area, "Service area side, meters")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Placement seed (mt19937_64)")->capture_default_str();
    gen->add_option("--out", gen_out, "Output scenario path")->capture_default_str();

    // run
    auto* run = app.add_subcommand("run", "Run one charging scheme on a scenario");
    std::string run_scenario, run_scheme = "pivot", run_config, run_out = "out";
    int run_sample = 0, run_jobs = 1;
    run->add_option("--scenario", run_scenario, "Scenario file")->required();
    run->add_option("--scheme", run_scheme, "Charging scheme: pivot, trading or flat")
        ->check(CLI::IsMember({"pivot", "trading", "flat"}))
        ->capture_default_str();
    run->add_option("--config", run_config, "Config file (JSON); defaults when omitted");
    run->add_option("--out", run_out, "Artifact directory")->capture_default_str();
    run->add_option("--sample-every", run_sample,
                    "Metric sampling period in steps (0: config value, default 100)")
        ->capture_default_str();
    run->add_option("--jobs", run_jobs, "Worker threads for start-spot optimization")
        ->capture_default_str();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a scheme x n x seed grid");
    std::vector<int> sweep_ns{100};
    std::vector<std::string> sweep_seeds{"1"};
    std::vector<std::string> sweep_schemes{"pivot", "trading", "flat"};
    std::string sweep_config, sweep_out = "sweep";
    double sweep_area = 100.0;
    int sweep_jobs = 1, sweep_sample = 0;
    bool sweep_artifacts = false;
    sweep->add_option("--n", sweep_ns, "Node counts")->delimiter(',')->capture_default_str();
    sweep->add_option("--seeds", sweep_seeds, "Seeds, single values or a..b ranges")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--schemes", sweep_schemes, "Schemes to run")
        ->delimiter(',')
        ->check(CLI::IsMember({"pivot", "trading", "flat"}))
        ->capture_default_str();
    sweep->add_option("--config", sweep_config, "Config file (JSON); defaults when omitted");
    sweep->add_option("--out", sweep_out, "Sweep output directory")->capture_default_str();
    sweep->add_option("--area", sweep_area, "Service area side, meters")->capture_default_str();
    sweep->add_option("--jobs", sweep_jobs, "Concurrent runs (determinism unaffected)")
        ->capture_default_str();
    sweep->add_option("--sample-every", sweep_sample,
                      "Metric sampling period in steps (0: config value, default 100)")
        ->capture_default_str();
    sweep->add_flag("--per-run-artifacts", sweep_artifacts,
                    "Also write per-run CSV artifacts (summaries are always written)");

    // report
    auto* report = app.add_subcommand("report", "Re-aggregate summaries from a sweep directory");
    std::string report_in, report_out = "report";
    report->add_option("--in", report_in, "Sweep directory with runs/<run_id>/summary.json")
        ->required();
    report->add_option("--out", report_out, "Report output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the usage error
        return code == 0 ? wrsn::cli::kExitOk : wrsn::cli::kExitError;
    }

    try {
        if (gen->parsed()) return wrsn::cli::cmd_gen(gen_n, gen_area, gen_seed, gen_out);
        if (run->parsed()) {
            wrsn::cli::RunArgs args;
            args.scenario = run_scenario;
            args.scheme = wrsn::scheme_from_name(run_scheme);
            if (!run_config.empty()) args.config = run_config;
            args.out = run_out;
            args.sample_every = run_sample;
            args.jobs = run_jobs;
            return wrsn::cli::cmd_run(args);
        }
        if (sweep->parsed()) {
            wrsn::cli::SweepArgs args;
            args.ns = sweep_ns;
            args.seeds = wrsn::cli::parse_seed_args(sweep_seeds);
            for (const std::string& s : sweep_schemes)
                args.schemes.push_back(wrsn::scheme_from_name(s));
            if (!sweep_config.empty()) args.config = sweep_config;
            args.out = sweep_out;
            args.area = sweep_area;
            args.jobs = sweep_jobs;
            args.sample_every = sweep_sample;
            args.per_run_artifacts = sweep_artifacts;
            return wrsn::cli::cmd_sweep(args);
        }
        if (report->parsed()) return wrsn::cli::cmd_report(report_in, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wrsn::cli::kExitError;
    }
    return wrsn::cli::kExitError;
}
