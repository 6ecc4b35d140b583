#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lfd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `lfd` invocation. `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`; the return value is the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfd::cli
