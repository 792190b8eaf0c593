#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace actopo::cli {

/// Entry point behind the `actopo` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on a usage error, 2 on a data error.
/// Machine-readable JSON goes to `out` (only with --json); everything meant
/// for people goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace actopo::cli
