#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace vstain::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // usage, configuration, I/O
inline constexpr int kExitNumeric = 2;    // NaN/Inf during training
inline constexpr int kExitShape = 3;      // shape or architecture mismatch
inline constexpr int kExitAlignment = 4;  // file sets do not pair up

int exit_code_for(const std::exception& e) noexcept;

// `vstain synth|train|predict|eval [--config FILE] [--out DIR] [--seed N]
// [--deterministic] ...`. Errors go to `err` prefixed with "error: ".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vstain::app
