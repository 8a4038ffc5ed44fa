#pragma once

// Command-line front end. run() parses arguments (after the program name),
// writes one record to `out` (or the --out file) and diagnostics to `err`.
//
// Exit codes: 0 success, 2 invalid input or scenario, 3 infeasible
// optimization or bound, 1 unexpected internal failure.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fblrate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfeasible = 3;

inline constexpr std::uint64_t kDefaultSeed = 2024;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a config file: either flat `key=value` lines (`#` comments allowed)
/// or a JSON record previously written by this tool, whose "parameters"
/// object is used. Keys mirror long flag names without the leading dashes.
std::map<std::string, std::string> load_config(const std::string& path);

} // namespace fblrate::cli
