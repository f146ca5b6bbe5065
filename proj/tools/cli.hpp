#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace streamcc::cli {

enum ExitCode : int {
    ok = 0,
    usage_error = 1,
    input_error = 2,
    search_budget = 3,
    library_error = 4,
    internal_error = 5,
};

/// Entry point of the `streamcc` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace streamcc::cli
