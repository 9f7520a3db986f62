#pragma once

// Subcommands of the command-line tool, callable without a process. Each
// takes the merged configuration (config file overlaid by flags) and
// returns a JSON document plus the process exit code.

#include <string>
#include <vector>

#include "nuh/io.hpp"

namespace nuh {

enum ExitCode : int { kExitOk = 0, kExitPrecondition = 2, kExitBudget = 3, kExitNumerical = 4 };

struct CommandResult {
  int exit_code = kExitOk;
  Json output;
};

const std::vector<std::string>& command_names();

/// Unknown commands and invalid input give kExitPrecondition with an
/// {"error": {...}} document.
CommandResult run_command(const std::string& name, const Json& config);

/// Map from config: "map" (path or inline object) or "k" with "t";
/// "order" overrides the composition order.
MapSpec map_from_config(const Json& config);

/// Values of t quoted for the standard family, checked by `threshold`.
std::vector<double> quoted_thresholds(int k, const std::string& condition);

}  // namespace nuh
