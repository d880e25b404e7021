#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqeffect::cli {

inline constexpr const char* kVersion = "0.1.0";

// Stable process exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitViolation = 3;
inline constexpr int kExitPrecondition = 4;

/// Runs the command line (without the program name). Reports go to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqeffect::cli
