#pragma once

#include <string>
#include <vector>

namespace lsk {

/// Exit codes: 0 success, 1 input error, 2 numerical failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace lsk
