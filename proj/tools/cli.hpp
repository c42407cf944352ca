#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pforge::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kNegative = 1,
  kUsage = 2,
  kUndecided = 3,
  kVerificationFailed = 4,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pforge::cli
