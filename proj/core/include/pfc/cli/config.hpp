#pragma once

#include "pfc/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pfc::cli {

/// A parsed run: the instance plus the per-subcommand knobs.
struct RunConfig {
    explicit RunConfig(Instance inst) : instance(std::move(inst)) {}

    Instance instance;
    OptimizeOptions optimizer;
    GradCheckOptions gradcheck;
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
    int contdep_pairs = 3;
    std::vector<double> separations{1.0, 1e-2, 1e-4, 1e-6};
    std::string text;    // raw file contents
    std::string sha256;  // of `text`
};

/// Reads a YAML config. Missing blocks take their defaults; unknown keys and
/// invalid values throw InvalidArgument naming the key.
RunConfig parse_config(const std::filesystem::path& path);

/// Same, from a string; relative file references resolve against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

}  // namespace pfc::cli
