#pragma once

#include <ostream>

namespace moebius::cli {

// Entry point of the moebius-kit tool. Returns the process exit code:
// 0 success, 1 invalid input, 2 singularity, 3 non-convergence.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace moebius::cli
