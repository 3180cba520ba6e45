#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Runs one command line (args excludes the program name). Errors are
/// reported on err and mapped to the exit codes above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnn::cli
