#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsi::cli {

/// Runs the command line `args` (without the program name).  JSON goes to
/// --output or `out`; tables and diagnostics go to `err`.
///
/// Exit codes: 0 success / all verdicts pass, 1 computational error (JSON
/// {"error", "message"}), 2 a verdict or golden comparison failed, 3 a
/// verdict could not be certified, 64 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsi::cli
