#pragma once

#include <iosfwd>

namespace roughldp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

/// Entry point of the roughldp command line tool.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roughldp::cli
