#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace igkit::cli {

// Full command-line front-end, parameterized over streams so tests can
// drive it in-process. argv conventions: args excludes the program name.
// Returns 0 on success, 1 when diagnostics of error severity were
// produced, 2 on usage or I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace igkit::cli
