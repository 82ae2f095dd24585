#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vhs::cli {

enum ExitCode : int {
    ok = 0,
    config_error = 1,
    no_convergence = 2,
    hypothesis_violation = 3,
    indeterminate = 4,
};

/// Entry point of the `vhs` tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace vhs::cli
