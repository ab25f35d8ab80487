#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dqof::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kBadConfig = 3,
  kCapExceeded = 4,
  kInvalidInput = 5,
  kCheckFailed = 6,
};

/// Runs the command line `args` (args[0] is the program name). Never throws;
/// errors are printed to `err` and mapped to an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dqof::cli
