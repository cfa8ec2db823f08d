#pragma once

#include <string>
#include <vector>

namespace qvdp::cli {

// Runs one command line (args excludes the program name). Returns the exit code:
// 0 ok, 2 usage, 3 numeric failure, 4 wrong regime, 5 insufficient statistics, 6 output not writable.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace qvdp::cli
