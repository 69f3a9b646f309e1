#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace causalreg {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitParse = 3,
    kExitDegenerate = 4,
};

/// One invocation: the subcommand plus a flat key-value map of its settings.
/// Keys are flag names without dashes. `threads` and `output` never change
/// the content written, so they are left out of the config echo.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output;  // empty: standard output
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& config_keys();

/// Flags override keys from --config (a JSON object). Unknown keys and bad
/// values raise ConfigError.
RunConfig parse_command_line(int argc, const char* const* argv);

/// Executes a parsed config; results go to cfg.output or `out`, diagnostics
/// to `err`. Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_command_line + run with exit-code mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace causalreg
