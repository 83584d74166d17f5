#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace miub::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

/// Runs one `miub` invocation; `args` excludes the program name. Reports go to
/// `out` (or the --out file), diagnostics to `err`.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace miub::cli
