#pragma once

#include <iosfwd>

namespace ksos {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs the ksos command line: simulate, optimize, evaluate, experiment and
/// report. Returns 0 on success, 1 when a computation fails (the failing cell
/// is named on err), 2 for usage errors and unreadable or invalid configs.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ksos
