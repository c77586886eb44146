#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netdepth::cli {

// Runs the command line given as argv-style arguments (without the program
// name). Reports go to `out`, single-line `error:`-prefixed diagnostics to
// `err`. Exit codes: 0 success, 1 usage/parse/validation errors, 2 analysis
// errors (coefficient overflow, path explosion, degenerate weights).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netdepth::cli
