// Command-line front end: simulate, enhance, stream-bench, calibrate, evaluate.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
// error. Settings resolve as command-line flag > --config JSON > default.
#pragma once

#include <string>
#include <vector>

namespace avse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace avse
