#pragma once

#include <iosfwd>

namespace tpinv::cli {

// Exit codes of run().
enum ExitCode : int { ok = 0, domain_failure = 1, io_failure = 2 };

// Parses argv and executes one subcommand. Results go to `out`, a single
// diagnostic line per failure goes to `err`. Shape, domain and numerical
// errors map to 1; file, format and command-line errors map to 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tpinv::cli
