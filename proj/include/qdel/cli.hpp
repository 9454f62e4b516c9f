#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdel {

/// Runs the command-line front end. `args` excludes the program name.
/// Exit codes: 0 success, 1 reference-table mismatch, 2 usage/parse/IO
/// error, 3 machine constraint violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdel
