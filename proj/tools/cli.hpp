#pragma once

#include <iosfwd>

namespace semg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFlagged = 2,
  kDataError = 3,
};

/// Entry point of the `semg` tool; output goes to the given streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace semg::cli
