#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aigc::cli {

/// Exit codes: 0 success, 1 domain error (name on `err`), 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aigc::cli
