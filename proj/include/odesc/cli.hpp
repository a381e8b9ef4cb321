// Command-line front end: subcommands simulate, construct, classify, sample,
// verify, solenoid, wired to JSON configs and CSV/JSON reports.
#pragma once

namespace odesc {

// Parses arguments, dispatches, and returns the process exit code:
// 0 success, 1 semantic negative (not conjugate, verification failed,
// system not generic), 2 usage error, 3 search failure.
int run_cli(int argc, const char* const* argv);

}  // namespace odesc
