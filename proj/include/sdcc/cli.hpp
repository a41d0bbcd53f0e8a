#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdcc {

/// Runs the command-line tool. `args[0]` is the program name. Returns the
/// process exit status: 0 on success, 2 for usage errors, 3 for invalid
/// input, 4 when the computation is undefined for the input and 5 for I/O
/// failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sdcc
