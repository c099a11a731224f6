#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dttm::cli {

// Runs the command line; returns the process exit code (0 success, 1 runtime
// failure, 2 usage error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dttm::cli
