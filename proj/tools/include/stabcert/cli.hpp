#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stabcert::cli {

enum ExitCode : int {
  kAsymptoticallyStable = 0,
  kInconclusive = 1,
  kUnstable = 2,
  kUsageError = 10,
  kParseError = 11,
  kLinearizationError = 12,
  kNumericError = 13,
  kIoError = 14,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stabcert::cli
