#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tdc {

// Runs the command-line tool. Exit codes: 0 success, 1 data error,
// 2 usage error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace tdc
