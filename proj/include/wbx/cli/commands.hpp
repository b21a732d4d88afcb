// Command-line front end. run_cli() takes the arguments after the program
// name so it can be driven from tests.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wbx/model.hpp"

namespace wbx::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNoEquilibrium = 3,
  kExitStall = 4,
};

int exit_code_for(ErrorCode code);

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace wbx::cli
