#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wrsn/engine.hpp"

namespace wrsn::cli {

// Exit codes: 0 success/Complete, 1 usage or I/O error, 2 run Stalled.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitStalled = 2;

int cmd_gen(int n, double area, std::uint64_t seed, const std::filesystem::path& out);

struct RunArgs {
    std::filesystem::path scenario;
    SchemeKind scheme = SchemeKind::Pivot;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out;
    int sample_every = 0;  // 0: take from config
    int jobs = 1;
};
int cmd_run(const RunArgs& args);

struct SweepArgs {
    std::vector<int> ns;
    std::vector<std::uint64_t> seeds;
    std::vector<SchemeKind> schemes;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out;
    double area = 100.0;
    int jobs = 1;
    int sample_every = 0;
    bool per_run_artifacts = false;
};
int cmd_sweep(const SweepArgs& args);

int cmd_report(const std::filesystem::path& sweep_dir, const std::filesystem::path& out);

// "7" or "3..9" (inclusive) into a seed list entry.
std::vector<std::uint64_t> parse_seed_args(const std::vector<std::string>& args);

std::string make_run_id(SchemeKind scheme, int n, std::uint64_t seed);

} // namespace wrsn::cli
