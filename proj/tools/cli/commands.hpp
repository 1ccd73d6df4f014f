#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fundchoice::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 2,
  kPreconditionFailure = 3,
  kIoFailure = 4,
};

/// Entry point shared by the executable and the tests. args excludes argv[0].
/// Tables go to `out`; diagnostics go to `err`, never into CSV files.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fundchoice::cli
