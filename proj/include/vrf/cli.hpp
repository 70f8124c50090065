#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vrf {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitScene = 1,    ///< scene, structural, frame or file error
    kExitFormula = 2,  ///< formula syntax, type or evaluation error
    kExitNumeric = 3,  ///< non-finite state during a run
};

/// Runs one command; `args` excludes the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace vrf
