#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deleg {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// The `deleg` command line; args excludes the program name. All output goes
// to the given streams so tests can run it in-process.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace deleg
