#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hbpk::cli {

/// Exit codes: 0 ok, 1 usage or invalid input, 2 runtime degeneracy.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDegenerate = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "HBPK_OUTPUT_DIR";

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hbpk::cli
