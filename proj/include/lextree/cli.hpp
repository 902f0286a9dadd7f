#pragma once

#include <iosfwd>

namespace lextree::cli {

/// Exit codes; part of the scripting contract.
enum ExitCode : int {
    kOk = 0,
    kFindings = 1, // diagnostics, conflicts or evaluation errors
    kUsage = 2,
    kIo = 3,
};

/// Runs the command line. `in` feeds the interactive `ask` loop.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace lextree::cli
