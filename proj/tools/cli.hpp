#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ballquad::cli {

/// Runs the command line in `args` (without the program name). Returns the
/// process exit code: 0 success, 2 usage or validation error, 1 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ballquad::cli
