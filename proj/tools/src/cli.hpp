#pragma once

#include <iosfwd>

namespace tkmp::cli {

// Exit codes: check 0/1/2 = MeasureFound/NoMeasure/Inconclusive; extend
// 0/1/2 = MeasureFound/Infeasible/Exhausted; certify-file 0/1 = pass/fail.
enum Exit : int {
  kMalformedInput = 10,  // unreadable file, bad JSON, parse error
  kInvalidInput = 11,    // well-formed but violates an invariant
  kRuntimeFailure = 12,
  kUsage = 13,
};

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tkmp::cli
