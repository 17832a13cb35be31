#pragma once

// The command-line front end: JSON model ingestion and command dispatch.

#include <iosfwd>
#include <string>
#include <vector>

namespace gcdef {

// Parses one CLI invocation (without the program name), runs it, writes the
// report to `out` and diagnostics to `err`. Returns the process exit code:
// 0 = success / check true, 1 = check evaluated to false (with a witness in
// the report), 2 = input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gcdef
