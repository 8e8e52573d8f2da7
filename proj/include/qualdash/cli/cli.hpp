// The `qualdash` command line: validate | preprocess | query | gen | serve.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qualdash::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

/// Runs one command. `args` excludes the program name. Data goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qualdash::cli
