#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace polcheck::cli {

/// Runs one `polcheck` invocation. `args` excludes the program name. Returns 0 on success or a
/// compliant verdict, 1 on a non-compliant verdict, 2 on invalid input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polcheck::cli
