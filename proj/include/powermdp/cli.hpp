#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace powermdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Exit 0 on success, 1 on a domain error, 2 on usage
/// errors and unreadable files.
int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// "G" or "A:B:STEP" (inclusive of B up to rounding).
std::vector<double> parse_gamma_grid(const std::string& text);

} // namespace powermdp::cli
