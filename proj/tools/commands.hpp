#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace retswitch::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kDisagreement = 1,  // sweep/verify found a mismatch
  kUsage = 2,         // bad arguments, unparsable or out-of-domain input
  kUndetermined = 3,  // simulate hit its limits without a conclusion
  kIoError = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace retswitch::cli
