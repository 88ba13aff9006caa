// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kbgen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDiverged = 3;

/// Runs one command line (args[0] is the program name) and returns the
/// process exit code. Subcommands: synth, stats, split, train, generate,
/// evaluate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kbgen::cli
