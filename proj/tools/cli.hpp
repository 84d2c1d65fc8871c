#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shellprobe::cli {

/// Runs the `shellprobe` command line. `args` excludes the program name.
/// Returns the process exit code: 0 ok, 1 I/O, 2 validation, 3 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shellprobe::cli
