#pragma once

namespace gaps {

/// Entry point of the `gaps` command-line tool (subcommands: solve, sweep,
/// embed). Exit status: 0 on success, 2 when a solve hit the iteration cap
/// without converging, 1 for invalid inputs or I/O failures; argument
/// parsing errors return the parser's own nonzero codes.
int run_cli(int argc, const char* const* argv);

}  // namespace gaps
