#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdr {

/// Runs one `cdr-anomaly` subcommand. Returns the process exit status; on
/// failure a single `error: <category>: <message>` line goes to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdr
