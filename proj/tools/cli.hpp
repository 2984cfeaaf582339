#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace noisebench {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int usage = 2;
inline constexpr int data = 3;
}  // namespace exit_code

/// Runs the command line (args excludes the program name) and returns the
/// process exit status. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noisebench
