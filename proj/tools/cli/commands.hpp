// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_TOOLS_COMMANDS_HPP
#define BLOCKMERGE_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace blockmerge::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // regression or assertion failure
inline constexpr int kExitUsage = 2;    // bad flags or bad data

// Entry point of the blockmerge tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blockmerge::tools

#endif  // BLOCKMERGE_TOOLS_COMMANDS_HPP
