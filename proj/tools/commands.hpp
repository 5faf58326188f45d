#ifndef RCAP_TOOLS_COMMANDS_HPP
#define RCAP_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rcap::cli {

enum Exit : int {
    ok = 0,
    internal = 1,
    invalid = 2,
    not_found = 3,
    blocked = 4,
    verify_failed = 5,
    budget = 6,
    unverified = 7,
};

/// Runs the command line (args excludes the program name).
int run(std::vector<std::string> const & args, std::ostream & out, std::ostream & err);

} // namespace rcap::cli

#endif
