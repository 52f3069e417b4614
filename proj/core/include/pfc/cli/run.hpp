#pragma once

#include "pfc/harness.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace pfc::cli {

struct RunRequest {
    std::string subcommand;  // simulate, gradcheck, optimize, sweep-eps, contdep
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    Fault fault = Fault::none;
};

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_bad_input = 2,
    exit_solver_failure = 3,
};

/// Runs one subcommand and writes its artifacts plus manifest.json under
/// `out`. The manifest is written on every path, including failures.
int run(const RunRequest& request);

}  // namespace pfc::cli
