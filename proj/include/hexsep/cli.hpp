#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hexsep::cli {

/// Seed used when neither --seed, a config file nor HEXSEP_SEED supplies one.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotSeparable = 2;
inline constexpr int kExitUsage = 64;

/// Runs the command line `args` (without the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key=value lines; blank lines and lines starting with '#' are ignored.
/// Throws std::runtime_error naming the line on malformed input.
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in);

}  // namespace hexsep::cli
