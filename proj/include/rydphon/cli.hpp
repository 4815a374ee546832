#pragma once

#include <ostream>

namespace rydphon {

enum ExitCode : int { kExitOk = 0, kExitComputation = 1, kExitConfig = 2, kExitCheckFailed = 3 };

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count for sweeps: hardware concurrency, capped by RYDPHON_THREADS when set.
int sweep_threads();

}  // namespace rydphon
