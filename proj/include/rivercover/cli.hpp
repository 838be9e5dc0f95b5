#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rivercover {

/// Exit codes: 0 success, 1 I/O or unexpected failure, 2 invalid input, 3 infeasible plan.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with args[0] taken as the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rivercover
