#pragma once

#include "cavmatch/io.hpp"

#include <string>

namespace cavmatch {

// Subcommand bodies.  All paths are written as <out_stem>.csv / .json;
// a trailing .csv/.json on the stem is stripped first.  Each returns 0 on
// success and throws on failure (run_cli maps exceptions to exit codes).
int cmd_derive(const RunConfig& cfg, const std::string& out_stem);
int cmd_simulate(const RunConfig& cfg, const std::string& out_stem,
                 const std::string& pulse_path, bool empty_cavity);
int cmd_sweep(const RunConfig& cfg, const std::string& out_stem, int jobs);
int cmd_timebin(const RunConfig& cfg, const std::string& out_stem);

// Full CLI: parse argv, dispatch, map errors to exit codes
// (0 success, 2 domain/validation error, 1 internal error).
int run_cli(int argc, const char* const* argv);

}  // namespace cavmatch
