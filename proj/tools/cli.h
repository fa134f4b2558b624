#pragma once

#include <iostream>

namespace npdmd::cli {

// Exit codes: 0 success, 2 input/data error, 3 solver non-convergence,
// 4 internal error.
int run(int argc, const char* const* argv, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace npdmd::cli
