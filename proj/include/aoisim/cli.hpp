#pragma once

namespace aoisim::cli {

// Full command-line entry point (subcommands simulate, sweep, optimize,
// analyze, compare). Exit codes: 0 success, 1 configuration error, 2 I/O
// error, 3 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace aoisim::cli
