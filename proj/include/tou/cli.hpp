#pragma once

#include <iosfwd>

namespace tou {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitValidation = 3 };

/// Entry point of the `tou` command line tool. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tou
