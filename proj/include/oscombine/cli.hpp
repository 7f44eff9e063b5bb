#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace osc {

/// Entry point behind the `oscombine` binary. `args` excludes the program
/// name. Returns 0 on success, 2 on usage/input errors, 3 on numeric
/// failures and theory-violation sentinels.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace osc
