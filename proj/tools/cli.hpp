#pragma once

#include <iosfwd>

namespace batchband::cli {

// Entry point of the batchband command line. Returns the process exit code:
// 0 success, 1 gated-check failure, 2 usage, configuration or data error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace batchband::cli
