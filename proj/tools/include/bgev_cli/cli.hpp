#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bgev::cli {

/// Exit codes of cli_dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsageError = 2;

/// Invalid invocation that the argument parser cannot detect on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value config: one pair per line, '#' starts a comment, blank
/// lines ignored, keys may carry a leading "--". Duplicate keys and lines
/// without '=' raise UsageError with "source:line:".
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in, const std::string& source);

/// Runs one subcommand. `args` excludes the program name, e.g.
/// {"prior", "--family", "gp", "--lambda", "7", "--out", "dir"}.
/// Options given on the command line override those from --config.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bgev::cli
