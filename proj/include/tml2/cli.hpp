#pragma once

#include <ostream>

namespace tml2::cli {

/// Exit status of `tml2c`.
enum ExitCode : int { kOk = 0, kInvalid = 1, kUsage = 2, kRuntime = 3, kIo = 4 };

/// Entry point of `tml2c`: check, sim, gen and fmt subcommands. Data goes to
/// `out` (or the trace file), diagnostics and usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tml2::cli
