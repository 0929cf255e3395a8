#pragma once

#include <iosfwd>

namespace nadyn::cli {

inline constexpr const char* kSchema = "nadyn.report/1";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kVerdict = 0, kError = 1, kInconclusive = 2 };

/// Parses the command line, runs one command and writes the JSON report to
/// `out` (or to --out). Diagnostics go to `err`. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nadyn::cli
