#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsw::cli {

/// Exit codes of the command-line tool.
enum Exit : int {
    ok = 0,
    failure = 1,
    config_error = 2,
    infeasible = 3,
    plan_error = 4,
};

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lsw::cli
