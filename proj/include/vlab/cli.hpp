#ifndef VLAB_CLI_HPP
#define VLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace vlab::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Parses `args` (without the program name), runs the subcommand and
/// returns the exit code. Results go to `out` unless redirected with --out;
/// errors are reported on `err` as a one-line JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace vlab::cli

#endif  // VLAB_CLI_HPP
