#pragma once

#include <string>
#include <vector>

namespace framelet {

// Command-line front end. Returns 0 on success, 2 on usage errors,
// 1 on runtime errors. `args` excludes the program name.
int run_cli(std::vector<std::string> args);

}  // namespace framelet
