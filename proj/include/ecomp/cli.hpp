#pragma once

// Command-line front end: analyze, iron, verify and sweep.

#include <iosfwd>
#include <string>
#include <vector>

namespace ecomp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCaps = 3;
inline constexpr int kExitLp = 4;
inline constexpr int kExitCheckFailed = 5;

/// `args` excludes the program name. Reports go to `out`, diagnostics to
/// `err`; the return value is the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecomp
