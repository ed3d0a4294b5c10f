#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lenctl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Runs the `lenctl` command line. args[0] is the program name. Reports go to
// `out`, diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lenctl::cli
