#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linser::cli {

enum ExitStatus : int { pass = 0, numeric_failure = 1, usage_error = 2 };

// Runs one experiment from a JSON configuration. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linser::cli
