#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pnopt {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMaxIterations = 2;
inline constexpr int kExitLineSearchFailed = 3;
inline constexpr int kExitUsage = 64;

/// Entry point behind the `pnopt` executable. args excludes the program name.
///   solve --problem {lasso|logistic|invcov} (--data FILE | --synthetic SEED,n,s)
///         --lambda R --method M --subproblem-stop {adaptive|exact|fixed:N}
///         --trace OUT.csv [--memory L] [--tol R] [--max-outer N] [--alpha R] ...
///   bench --problem P (--data FILE | --synthetic SEED,n,s) --lambda R --out-dir DIR
///         [--methods a,b] [--policies x,y] ...
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pnopt
