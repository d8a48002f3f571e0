#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexcontra::cli {

/// Runs the command line. Results go to `out` (or to --out files),
/// diagnostics to `err`. Returns the process exit code: 0 on success,
/// 1 on a validation or computation error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexcontra::cli
