#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace acp::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIncomplete = 1;  // run below full completion, or validation violations
inline constexpr int kExitUsage = 2;       // bad flags or unreadable inputs

// args excludes the program name. Diagnostics go to err; everything a
// subcommand prints on success goes to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace acp::cli
