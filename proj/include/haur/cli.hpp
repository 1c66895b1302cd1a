#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace haur {

// Exit codes: 0 success, 1 validation or usage error, 2 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace haur
