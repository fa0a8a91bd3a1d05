#pragma once

#include <string>
#include <vector>

namespace geomatch::cli {

// Dispatches one command line (without the program name) and returns the
// process exit status: 0 on success, 1 on a domain or input error, CLI11's
// code on a usage error. Errors print a one-line JSON record to stderr.
int run_command(const std::vector<std::string>& args);

}  // namespace geomatch::cli
