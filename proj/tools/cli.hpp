#ifndef SPARSE_NLMS_TOOLS_CLI_HPP
#define SPARSE_NLMS_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sparse_nlms::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Entry point of the `sparse_nlms` tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparse_nlms::cli

#endif  // SPARSE_NLMS_TOOLS_CLI_HPP
