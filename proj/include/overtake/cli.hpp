#pragma once

#include <string>
#include <vector>

namespace overtake {

// Routes argv to the subcommand workflows. Exit codes: 0 success (or Safe),
// 1 error, 2 Unsafe (decide only). Input files are never modified.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace overtake
