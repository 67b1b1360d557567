#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ncclab {

/// Runs one subcommand; args excludes the program name. Returns 0 on
/// success, 1 on usage or domain errors and 2 on invariant violations.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncclab
