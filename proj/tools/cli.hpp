#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sica::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNotSparse = 2;
inline constexpr int kResourceError = 3;

// Runs one command; args excludes the program name. Data goes to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sica::cli
