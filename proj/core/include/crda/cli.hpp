#pragma once

namespace crda {

/// Command-line entry point with subcommands train / cv / predict / eval /
/// synth. Returns 0 on success, 2 on usage errors, 1 on computation errors.
int run_command(int argc, const char* const* argv);

}  // namespace crda
