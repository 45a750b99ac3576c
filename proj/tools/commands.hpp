#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "config.hpp"

namespace swingup::cli {

// Subcommand bodies. Each writes fixed-name files under out_dir and returns
// the written paths so the caller can report them.
std::vector<std::filesystem::path> cmd_trajectory(const ConfigFile& cfg,
                                                  const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> cmd_sweep(const ConfigFile& cfg,
                                             const std::filesystem::path& out_dir, int threads,
                                             std::ostream& err);
std::vector<std::filesystem::path> cmd_spectrum(const ConfigFile& cfg,
                                                const std::filesystem::path& out_dir,
                                                std::ostream& err);
std::vector<std::filesystem::path> cmd_photonics(const ConfigFile& cfg,
                                                 const std::filesystem::path& out_dir);

// Prints the requested closed-form values, as an aligned units-annotated
// table or as JSON.
void cmd_design(const DesignJob& job, bool as_json, std::ostream& out);

// Argument-vector entry point shared by main() and the tests. Exit codes:
// 0 success, 2 configuration error, 3 numerical failure, 4 convergence
// failure, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swingup::cli
