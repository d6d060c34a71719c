#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jumpdiff {

// In-process entry point used by both the binary and the tests. args holds
// everything after the program name. Exit codes: 0 pass, 2 verification
// failure, 3 numerical failure (diagnostic printed), 64 usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jumpdiff
