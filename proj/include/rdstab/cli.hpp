#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rdstab {

// The command-line tool as a callable: `args` excludes the program name.
// Returns the process exit code: 0 for a definitive result, 1 for an
// undecided or negative outcome, 2 for usage, input, or numeric failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rdstab
