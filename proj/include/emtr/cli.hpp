#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "emtr/network.hpp"
#include "emtr/simulator.hpp"

namespace emtr {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitNoTransient = 2 };

/// Parses `edge=<id>,offset=<m>,R=<ohm>,angle=<deg>[,window=<us>][,name=<label>]`.
/// Missing R defaults to 0 and angle to 90. Throws ConfigError.
FaultScenario parse_fault_spec(const NetworkTopology& net, const std::string& spec, std::string* name = nullptr);

/// Runs the tool with args[0] as the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emtr
