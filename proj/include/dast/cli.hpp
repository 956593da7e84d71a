#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCheckFailed = 3;

// Entry point for the `dast` executable. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace dast::cli
