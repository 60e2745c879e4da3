#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fitchmi/session.hpp"

namespace fitchmi {

// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitUsage = 64;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// Reads one response: a bare word is a command, anything else is a fragment
// ending at a line holding only `.` (or at end of input).
std::optional<UserResponse> read_response(std::istream& in);

}  // namespace fitchmi
