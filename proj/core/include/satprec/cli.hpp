#pragma once

#include <string>
#include <vector>

#include "satprec/config.hpp"
#include "satprec/env.hpp"

namespace satprec::cli {

/// Environment for a run. `start_offset` shifts the clock, e.g. to evaluate
/// on a window after the training window.
env::DelayedCsiEnv make_env(const config::RunConfig& cfg, double start_offset = 0.0);

/// Entry point shared by the `satprec` binary and the tests. Subcommands:
/// constellation, train, eval, baseline, check. Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace satprec::cli
