#pragma once

namespace polyctrl::cli {

// Entry point for the command-line front end. Exit codes: 0 success,
// 1 numerical failure, 2 usage or configuration error.
int run(int argc, const char* const* argv);

}  // namespace polyctrl::cli
