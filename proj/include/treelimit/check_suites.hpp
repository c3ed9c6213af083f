#pragma once

#include <string>

namespace treelimit {

// Runs a named property suite ("hyperbolic", "tree-ops", "lengths", "all"),
// printing one line per check and reproduction seeds on failure. Returns the
// process exit status: 0 all pass, 1 failures, 3 unknown suite.
// inject_fault deliberately breaks one hyperbolic check (test hook).
int run_check_suite(const std::string& name, bool inject_fault = false);

}  // namespace treelimit
